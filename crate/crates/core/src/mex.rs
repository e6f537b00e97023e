//! The generic minimum-enclosing-shape framework.
//!
//! A shape family supplies a center type, a ranking distance `f` (may be
//! negative), the touching size of a point, and containment. Families
//! satisfying the three laws below get the far-set selection, threshold
//! computation, uniform-adaptive sampling, and sandwich estimation for
//! free, which is what the k-center, slab, and halfspace drivers build on.
//!
//! Laws (checked by [`check_family_laws`]):
//! * nesting: a smaller size never covers a point the larger size misses;
//! * order consistency: if p0 is covered and f(c,p) <= f(c,p0), p is too;
//! * touching minimality: `min_enclosing_size(c,p)` covers p and no
//!   smaller size does.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{
    dist, dist_counted, partition_farthest, rank_desc, sample_indices, EvalCounter, Point,
    PointSet, RngStream,
};
use crate::outliers::{SamplingPlan, SandwichEstimate, UasPick};

pub trait ShapeFamily {
    type Center: Clone + Send + Sync;

    /// Ranking distance f(c, p). Only the induced order matters; values
    /// may be negative. Counted as a distance evaluation.
    fn rank(&self, center: &Self::Center, p: &[f64], counter: &EvalCounter) -> f64;

    /// Smallest size whose shape touches `p`; may be +inf when no finite
    /// shape centered at `center` contains `p`.
    fn min_enclosing_size(&self, center: &Self::Center, p: &[f64]) -> f64;

    /// Membership of `p` in the shape of the given size.
    fn contains(&self, center: &Self::Center, size: f64, p: &[f64]) -> bool {
        self.min_enclosing_size(center, p) <= size
    }
}

/// Generators for randomized law checking.
pub trait FamilySampler: ShapeFamily {
    fn sample_center(&self, rng: &mut ChaCha8Rng) -> Self::Center;
    fn sample_size(&self, rng: &mut ChaCha8Rng) -> f64;
    /// Points may be conditioned on the center for families whose laws
    /// hold on a restricted domain (the halfspace family needs positive
    /// projections).
    fn sample_point(&self, center: &Self::Center, rng: &mut ChaCha8Rng) -> Point;
}

/// A point set, outlier fraction, and the shape family to fit.
#[derive(Debug, Clone)]
pub struct MexInstance<F: ShapeFamily> {
    pub points: PointSet,
    pub gamma: f64,
    pub family: F,
}

/// Euclidean balls: the family that reduces the framework to plain MEB.
#[derive(Debug, Clone, Copy)]
pub struct BallShape {
    pub dim: usize,
}

impl ShapeFamily for BallShape {
    type Center = Point;

    fn rank(&self, center: &Point, p: &[f64], counter: &EvalCounter) -> f64 {
        dist_counted(center, p, counter)
    }

    fn min_enclosing_size(&self, center: &Point, p: &[f64]) -> f64 {
        dist(center, p)
    }
}

impl FamilySampler for BallShape {
    fn sample_center(&self, rng: &mut ChaCha8Rng) -> Point {
        (0..self.dim).map(|_| rng.gen_range(-2.0..2.0)).collect()
    }

    fn sample_size(&self, rng: &mut ChaCha8Rng) -> f64 {
        rng.gen_range(0.0..3.0)
    }

    fn sample_point(&self, _center: &Point, rng: &mut ChaCha8Rng) -> Point {
        (0..self.dim).map(|_| rng.gen_range(-4.0..4.0)).collect()
    }
}

/// The `m` highest-ranked points of `ps` under the family's distance;
/// ties resolve to the smaller index.
pub fn farthest_set<F: ShapeFamily>(
    ps: &PointSet,
    family: &F,
    center: &F::Center,
    m: usize,
    counter: &EvalCounter,
) -> Result<Vec<usize>> {
    if m == 0 || m > ps.n() {
        return Err(Error::Input(format!("m = {m} out of range for n = {}", ps.n())));
    }
    let mut pairs: Vec<(f64, usize)> = ps
        .iter()
        .enumerate()
        .map(|(i, p)| (family.rank(center, p, counter), i))
        .collect();
    if m < ps.n() {
        partition_farthest(&mut pairs, m);
    }
    let mut q: Vec<usize> = pairs[..m].iter().map(|&(_, i)| i).collect();
    q.sort_unstable();
    Ok(q)
}

/// The threshold size l with P \ x(center, l) equal to the far set of
/// size m: the touching size of the (m+1)-th farthest point. May be +inf
/// for families with unbounded touching sizes (infeasible center).
pub fn threshold_size<F: ShapeFamily>(
    ps: &PointSet,
    family: &F,
    center: &F::Center,
    m: usize,
    counter: &EvalCounter,
) -> Result<f64> {
    if m >= ps.n() {
        return Err(Error::Input(format!("m = {m} must stay below n = {}", ps.n())));
    }
    if m == 0 {
        return Err(Error::input("m = 0 has no excluded set"));
    }
    let mut pairs: Vec<(f64, usize)> = ps
        .iter()
        .enumerate()
        .map(|(i, p)| (family.rank(center, p, counter), i))
        .collect();
    let boundary = partition_farthest(&mut pairs, m);
    Ok(family.min_enclosing_size(center, ps.point(boundary.1)))
}

/// Uniform-adaptive sampling under an arbitrary family ranking. Identical
/// draw sequence to the Euclidean
/// [`uniform_adaptive_sample`](crate::outliers::uniform_adaptive_sample)
/// for the ball family.
pub fn generalized_uas<F: ShapeFamily>(
    ps: &PointSet,
    family: &F,
    center: &F::Center,
    plan: &SamplingPlan,
    rng: &mut ChaCha8Rng,
    counter: &EvalCounter,
) -> Result<UasPick> {
    if plan.exact_uas {
        let mut pairs: Vec<(f64, usize)> = ps
            .iter()
            .enumerate()
            .map(|(i, p)| (family.rank(center, p, counter), i))
            .collect();
        partition_farthest(&mut pairs, plan.t);
        let pick = rng.gen_range(0..plan.t);
        return Ok(UasPick { index: pairs[pick].1, exact_mode: true });
    }
    let sample = sample_indices(ps.n(), plan.n_prime, rng);
    let mut pairs: Vec<(f64, usize)> = sample
        .into_iter()
        .map(|i| (family.rank(center, ps.point(i), counter), i))
        .collect();
    if plan.t_prime < pairs.len() {
        partition_farthest(&mut pairs, plan.t_prime);
    }
    let pick = rng.gen_range(0..plan.t_prime);
    Ok(UasPick { index: pairs[pick].1, exact_mode: false })
}

/// Sandwich estimation under an arbitrary family: the touching size of the
/// (t''+1)-th farthest sampled point. +inf signals an infeasible size for
/// this center.
pub fn generalized_sandwich<F: ShapeFamily>(
    ps: &PointSet,
    family: &F,
    center: &F::Center,
    plan: &SamplingPlan,
    rng: &mut ChaCha8Rng,
    counter: &EvalCounter,
) -> Result<SandwichEstimate> {
    let (pairs, rank, exact) = if plan.exact_sandwich {
        let pairs: Vec<(f64, usize)> = ps
            .iter()
            .enumerate()
            .map(|(i, p)| (family.rank(center, p, counter), i))
            .collect();
        (pairs, plan.t_dprime_exact, true)
    } else {
        let sample = sample_indices(ps.n(), plan.n_dprime, rng);
        let pairs: Vec<(f64, usize)> = sample
            .into_iter()
            .map(|i| (family.rank(center, ps.point(i), counter), i))
            .collect();
        (pairs, plan.t_dprime, false)
    };
    if rank >= pairs.len() {
        return Err(Error::Input(format!(
            "sandwich rank {rank} out of range for sample of {}",
            pairs.len()
        )));
    }
    let mut pairs = pairs;
    let boundary = partition_farthest(&mut pairs, rank);
    let size = family.min_enclosing_size(center, ps.point(boundary.1));
    Ok(SandwichEstimate { size, exact_mode: exact })
}

/// Result of randomized law checking; failures carry the first witness.
#[derive(Debug, Clone, Default)]
pub struct LawReport {
    pub trials: usize,
    pub nesting_failures: usize,
    pub order_failures: usize,
    pub touching_failures: usize,
    pub first_witness: Option<String>,
}

impl LawReport {
    pub fn pass(&self) -> bool {
        self.nesting_failures == 0 && self.order_failures == 0 && self.touching_failures == 0
    }
}

/// Property-tests the three family laws on random (center, size, point)
/// triples.
pub fn check_family_laws<F: FamilySampler>(family: &F, trials: usize, stream: RngStream) -> LawReport {
    let mut rng = stream.rng();
    let counter = EvalCounter::new();
    let mut report = LawReport { trials, ..Default::default() };
    let mut witness = |report: &mut LawReport, law: &str, msg: String| {
        if report.first_witness.is_none() {
            report.first_witness = Some(format!("{law}: {msg}"));
        }
    };
    for _ in 0..trials {
        let center = family.sample_center(&mut rng);
        let p = family.sample_point(&center, &mut rng);
        let p0 = family.sample_point(&center, &mut rng);
        let s1 = family.sample_size(&mut rng);
        let s2 = family.sample_size(&mut rng);
        let (lo, hi) = if s1 <= s2 { (s1, s2) } else { (s2, s1) };

        // Nesting: x(c, lo) is covered by x(c, hi).
        if family.contains(&center, lo, &p) && !family.contains(&center, hi, &p) {
            report.nesting_failures += 1;
            witness(&mut report, "nesting", format!("p = {p:?}, sizes {lo} <= {hi}"));
        }

        // Order consistency.
        if family.contains(&center, s1, &p0)
            && family.rank(&center, &p, &counter) <= family.rank(&center, &p0, &counter)
            && !family.contains(&center, s1, &p)
        {
            report.order_failures += 1;
            witness(&mut report, "order", format!("p = {p:?}, p0 = {p0:?}, size {s1}"));
        }

        // Touching minimality.
        let r0 = family.min_enclosing_size(&center, &p);
        if r0.is_finite() {
            if !family.contains(&center, r0, &p) {
                report.touching_failures += 1;
                witness(&mut report, "touching", format!("p = {p:?} not in its touching shape {r0}"));
            }
            if r0 > 0.0 {
                let shrink: f64 = rng.gen_range(1e-9..1.0);
                let smaller = r0 * (1.0 - shrink);
                if smaller < r0 && family.contains(&center, smaller, &p) {
                    report.touching_failures += 1;
                    witness(&mut report, "touching", format!("p = {p:?} in shape {smaller} < {r0}"));
                }
            }
        } else if family.contains(&center, 1e100, &p) {
            report.touching_failures += 1;
            witness(&mut report, "touching", format!("p = {p:?} has infinite touching size yet is covered"));
        }
    }
    report
}
