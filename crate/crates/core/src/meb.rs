//! Core-set construction for the minimum enclosing ball: an outer greedy
//! loop that repeatedly adds the farthest point, with a first-order inner
//! solver producing the approximate center of the current core-set.

use crate::error::{Error, Result};
use crate::geometry::{dist, sq_dist, EvalCounter, Point, PointSet, RngStream};

use rand::Rng;

/// Hard cap on inner-solver iterations; hitting it is reported in telemetry.
pub const INNER_ITERS_CAP: u64 = 1_000_000;

/// Parameters of the core-set loop, all derived from `epsilon` and the
/// split parameter `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxParams {
    pub epsilon: f64,
    /// Split between outer and inner error; defaults to eps/(2+eps), which
    /// makes z = ceil(2/eps) + 1.
    pub s: f64,
    /// Inner center accuracy: xi = s*eps/(1+eps), always < eps/(1+eps).
    pub xi: f64,
    /// Core-set size bound: z = ceil(2/((1-s)*eps)).
    pub z: usize,
    /// Inner first-order iterations: ceil(1/xi^2), capped.
    pub inner_iters: u64,
    /// True when the cap truncated the inner iteration count.
    pub inner_capped: bool,
}

impl ApproxParams {
    pub fn new(epsilon: f64) -> Result<Self> {
        let s = epsilon / (2.0 + epsilon);
        Self::with_split(epsilon, s)
    }

    pub fn with_split(epsilon: f64, s: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::Input(format!("epsilon must be in (0,1), got {epsilon}")));
        }
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::Input(format!("s must be in (0,1), got {s}")));
        }
        let xi = s * epsilon / (1.0 + epsilon);
        let z = (2.0 / ((1.0 - s) * epsilon)).ceil() as usize;
        let raw_iters = (1.0 / (xi * xi)).ceil();
        let inner_capped = raw_iters > INNER_ITERS_CAP as f64;
        let inner_iters = if inner_capped { INNER_ITERS_CAP } else { raw_iters as u64 };
        Ok(ApproxParams { epsilon, s, xi, z, inner_iters, inner_capped })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

impl Ball {
    /// Containment with a relative slack on the radius.
    pub fn contains(&self, p: &[f64], rel_tol: f64) -> bool {
        dist(&self.center, p) <= self.radius * (1.0 + rel_tol) + 1e-300
    }
}

/// Output of [`coreset_meb`].
#[derive(Debug, Clone)]
pub struct CoresetMeb {
    pub ball: Ball,
    /// Indices of the core-set T in the input set.
    pub coreset: Vec<usize>,
    /// Rounds of the outer loop executed.
    pub rounds: usize,
    /// True when the (1+eps) stop test fired (as opposed to exhausting z).
    pub converged: bool,
}

/// First-order approximate MEB center of `ps`: starting from the first
/// point, repeatedly steps toward the farthest point with step 1/(i+1).
///
/// After ceil(1/xi^2) iterations the result lies within xi*Rad(ps) of the
/// exact center.
pub fn approx_center(ps: &PointSet, xi: f64, counter: &EvalCounter) -> Result<Point> {
    if !(xi > 0.0 && xi < 1.0) {
        return Err(Error::Input(format!("xi must be in (0,1), got {xi}")));
    }
    let iters = ((1.0 / (xi * xi)).ceil() as u64).min(INNER_ITERS_CAP);
    let indices: Vec<usize> = (0..ps.n()).collect();
    Ok(approx_center_indices(ps, &indices, iters, counter))
}

/// Inner solver over a core-set given as indices into `ps`.
pub(crate) fn approx_center_indices(
    ps: &PointSet,
    subset: &[usize],
    iters: u64,
    counter: &EvalCounter,
) -> Point {
    debug_assert!(!subset.is_empty());
    let mut center: Point = ps.point(subset[0]).to_vec();
    if subset.len() == 1 {
        return center;
    }
    for i in 1..=iters {
        // Farthest core-set point from the running center; ties take the
        // earliest subset entry.
        let mut far = (0usize, f64::NEG_INFINITY);
        for (j, &idx) in subset.iter().enumerate() {
            let d2 = sq_dist(ps.point(idx), &center);
            if d2 > far.1 {
                far = (j, d2);
            }
        }
        counter.record_dists(subset.len() as u64);
        counter.record_touched(subset.len() as u64);
        let p = ps.point(subset[far.0]);
        let step = 1.0 / (i as f64 + 1.0);
        for (c, x) in center.iter_mut().zip(p) {
            *c += step * (x - *c);
        }
    }
    center
}

/// Greedy core-set MEB.
///
/// Runs at most `z` rounds. Each round recomputes the approximate center
/// of the core-set, scans for the farthest input point, and either stops
/// (the covering ball is already within (1+eps) of the running core-set
/// radius estimate) or adds that point. The returned ball is the best
/// covering ball seen over all rounds, so it always covers `ps`.
///
/// `rng`: `None` starts from index 0; `Some` draws the start uniformly.
pub fn coreset_meb(
    ps: &PointSet,
    params: &ApproxParams,
    rng: Option<RngStream>,
    counter: &EvalCounter,
) -> CoresetMeb {
    let init = match rng {
        Some(stream) => stream.rng().gen_range(0..ps.n()),
        None => 0,
    };
    let mut coreset = vec![init];
    let mut best: Option<Ball> = None;
    let mut rounds = 0;
    let mut converged = false;

    for round in 1..=params.z {
        rounds = round;
        let center = approx_center_indices(ps, &coreset, params.inner_iters, counter);

        // Core-set radius estimate, normalized so it never exceeds Rad(T):
        // the center is within xi*Rad(T) of the exact one, so the farthest
        // core-set distance is at most (1+xi)*Rad(T).
        let mut rmax_t = 0.0f64;
        for &idx in &coreset {
            rmax_t = rmax_t.max(sq_dist(ps.point(idx), &center));
        }
        counter.record_dists(coreset.len() as u64);
        counter.record_touched(coreset.len() as u64);
        let r_hat = rmax_t.sqrt() / (1.0 + params.xi);

        // Farthest input point: defines the covering radius from `center`.
        let mut far = (0usize, f64::NEG_INFINITY);
        for (i, p) in ps.iter().enumerate() {
            let d2 = sq_dist(p, &center);
            if d2 > far.1 {
                far = (i, d2);
            }
        }
        counter.record_dists(ps.n() as u64);
        counter.record_touched(ps.n() as u64);
        let radius = far.1.max(0.0).sqrt();

        if best.as_ref().map_or(true, |b| radius < b.radius) {
            best = Some(Ball { center, radius });
        }
        if radius <= (1.0 + params.epsilon) * r_hat {
            converged = true;
            break;
        }
        // Additions stop once the core-set reaches z points.
        if round == params.z || coreset.len() == params.z {
            break;
        }
        coreset.push(far.0);
    }

    CoresetMeb { ball: best.expect("at least one round"), coreset, rounds, converged }
}
