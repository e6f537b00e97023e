//! MEB with outliers: a linear-time trial that scans for the exact far set
//! and threshold radius each round, a sub-linear trial that replaces both
//! scans with uniform-adaptive sampling and sandwich estimation, and a
//! repetition wrapper that keeps the candidate with the smallest estimated
//! radius.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{
    dist, dist_counted, kth_largest, partition_farthest, sample_indices, CounterSnapshot,
    EvalCounter, PointSet, RngStream,
};
use crate::instances::PlantedTruth;
use crate::meb::{approx_center_indices, ApproxParams, Ball};

/// A point set together with its outlier fraction and optional planted
/// ground truth.
#[derive(Debug, Clone)]
pub struct OutlierInstance {
    pub points: PointSet,
    pub gamma: f64,
    pub truth: Option<PlantedTruth>,
}

impl OutlierInstance {
    pub fn new(points: PointSet, gamma: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&gamma) {
            return Err(Error::Input(format!("gamma must be in [0,1), got {gamma}")));
        }
        Ok(OutlierInstance { points, gamma, truth: None })
    }

    pub fn with_truth(points: PointSet, gamma: f64, truth: PlantedTruth) -> Result<Self> {
        let mut inst = Self::new(points, gamma)?;
        inst.truth = Some(truth);
        Ok(inst)
    }

    /// Number of points a solution must cover: ceil((1-gamma) n).
    pub fn keep_count(&self) -> usize {
        ((1.0 - self.gamma) * self.points.n() as f64).ceil() as usize
    }
}

/// Parameters of the bi-criteria solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiCriteriaParams {
    pub epsilon: f64,
    pub delta: f64,
    pub eta1: f64,
    pub eta2: f64,
    /// Outer rounds per trial; defaults to ceil(2/eps) + 1.
    pub z: usize,
    /// Default repetition count for fixed-mode [`repeat_best`].
    pub repeats: usize,
    /// Sample-size constants for n' and n''.
    pub c1: f64,
    pub c2: f64,
}

impl BiCriteriaParams {
    pub fn new(epsilon: f64, delta: f64, eta1: f64, eta2: f64) -> Result<Self> {
        for (name, v) in [("epsilon", epsilon), ("delta", delta), ("eta1", eta1), ("eta2", eta2)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Input(format!("{name} must be in (0,1), got {v}")));
            }
        }
        let z = ApproxParams::new(epsilon)?.z;
        Ok(BiCriteriaParams { epsilon, delta, eta1, eta2, z, repeats: 1, c1: 24.0, c2: 24.0 })
    }

    pub fn with_z(mut self, z: usize) -> Self {
        self.z = z;
        self
    }

    pub fn with_repeats(mut self, repeats: usize) -> Self {
        self.repeats = repeats;
        self
    }

    pub fn with_eta2(mut self, eta2: f64) -> Self {
        self.eta2 = eta2;
        self
    }

    /// Inner-solver parameters derived from epsilon.
    pub fn approx(&self) -> ApproxParams {
        ApproxParams::new(self.epsilon).expect("validated epsilon")
    }

    /// Exclusion cap of the sandwich guarantee: (1+delta)^2/(1-delta) * gamma * n.
    pub fn exclusion_cap(&self, gamma: f64, n: usize) -> f64 {
        (1.0 + self.delta).powi(2) / (1.0 - self.delta) * gamma * n as f64
    }
}

/// The far-set size of the linear trial: t = ceil((1+delta) gamma n),
/// clamped to at least one so the gamma = 0 case degenerates to plain
/// farthest-point selection.
pub fn far_count(n: usize, gamma: f64, delta: f64) -> Result<usize> {
    let t = ((1.0 + delta) * gamma * n as f64).ceil() as usize;
    let t = t.max(1);
    if t >= n {
        return Err(Error::Input(format!(
            "(1+delta)*gamma*n = {t} leaves no coverable point (n = {n})"
        )));
    }
    Ok(t)
}

/// Sample sizes and selection ranks of one sub-linear trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplingPlan {
    pub n_prime: usize,
    pub n_dprime: usize,
    /// ceil((1+delta) gamma n): rank of the exact far set.
    pub t: usize,
    /// ceil(1.5 (1+delta) gamma n'): far rank within the uniform sample.
    pub t_prime: usize,
    /// ceil((1+delta)^2 gamma n''): sandwich rank within the sample.
    pub t_dprime: usize,
    /// ceil((1+delta)^2 gamma n): sandwich rank in exact mode.
    pub t_dprime_exact: usize,
    /// n' >= n: the far set is computed on all of P instead.
    pub exact_uas: bool,
    /// n'' >= n: the sandwich rank is taken over all of P instead.
    pub exact_sandwich: bool,
    pub n: usize,
}

impl SamplingPlan {
    pub fn new(params: &BiCriteriaParams, n: usize, gamma: f64) -> Result<Self> {
        if params.delta >= 1.0 / 3.0 {
            return Err(Error::Input(format!(
                "sandwich estimation requires delta < 1/3, got {}",
                params.delta
            )));
        }
        if gamma <= 0.0 || gamma >= 1.0 {
            return Err(Error::Input(format!(
                "sampling plan requires gamma in (0,1), got {gamma}"
            )));
        }
        let d1 = 1.0 + params.delta;
        if d1 * gamma >= 1.0 || d1 * d1 * gamma >= 1.0 {
            return Err(Error::input("(1+delta)^2 * gamma must stay below 1"));
        }
        let t = far_count(n, gamma, params.delta)?;
        let n_prime =
            ((params.c1 / (params.delta * gamma)) * (1.0 / params.eta1).ln()).ceil() as usize;
        let n_dprime = ((params.c2 / (params.delta * params.delta * gamma))
            * (1.0 / params.eta2).ln())
        .ceil() as usize;
        let t_prime = ((1.5 * d1 * gamma * n_prime as f64).ceil() as usize)
            .clamp(1, n_prime);
        let t_dprime = ((d1 * d1 * gamma * n_dprime as f64).ceil() as usize).max(1);
        if t_dprime >= n_dprime {
            return Err(Error::Input(format!(
                "sandwich rank t'' = {t_dprime} must stay below n'' = {n_dprime}"
            )));
        }
        let t_dprime_exact = ((d1 * d1 * gamma * n as f64).ceil() as usize).max(1);
        Ok(SamplingPlan {
            n_prime,
            n_dprime,
            t,
            t_prime,
            t_dprime,
            t_dprime_exact,
            exact_uas: n_prime >= n,
            exact_sandwich: n_dprime >= n,
            n,
        })
    }
}

/// One candidate ball center with its (estimated or exact) radius.
#[derive(Debug, Clone)]
pub struct Candidate {
    pub center: Vec<f64>,
    pub size_estimate: f64,
    pub round: usize,
    /// Stream id of the repetition that produced it.
    pub origin: u64,
}

/// Exact coverage counts from a full scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Coverage {
    pub covered: usize,
    pub excluded: usize,
}

/// Final solver output.
#[derive(Debug, Clone)]
pub struct SolutionReport {
    pub ball: Ball,
    /// Exact counts from the final full scan; `None` when the caller asked
    /// for a strict sub-linear run without the scan.
    pub coverage: Option<Coverage>,
    /// Distance evaluations of the trial phase (final scan excluded).
    pub counter: CounterSnapshot,
    pub repetitions_used: usize,
    /// True when any trial fell back to an exact-mode scan.
    pub fallback: bool,
}

/// All candidates of a single trial plus the winning one.
#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub candidates: Vec<Candidate>,
    pub best: Candidate,
    pub fallback: bool,
}

fn pick_best(candidates: &[Candidate]) -> Candidate {
    candidates
        .iter()
        .min_by(|a, b| {
            a.size_estimate
                .total_cmp(&b.size_estimate)
                .then(a.origin.cmp(&b.origin))
                .then(a.round.cmp(&b.round))
        })
        .expect("at least one candidate")
        .clone()
}

/// Outcome of a uniform-adaptive draw.
#[derive(Debug, Clone, Copy)]
pub struct UasPick {
    /// Index into P of the selected point.
    pub index: usize,
    /// True when the exact-mode fallback ran (sample size reached n).
    pub exact_mode: bool,
}

/// Uniform-Adaptive Sampling: draw n' points uniformly with replacement,
/// keep the t' farthest from `o`, and return one of them uniformly.
///
/// In exact mode (n' >= n) the draw comes from the true far set of size t,
/// which is exactly the linear trial's selection step.
pub fn uniform_adaptive_sample(
    ps: &PointSet,
    o: &[f64],
    plan: &SamplingPlan,
    rng: &mut ChaCha8Rng,
    counter: &EvalCounter,
) -> Result<UasPick> {
    if plan.exact_uas {
        let mut pairs: Vec<(f64, usize)> = ps
            .iter()
            .enumerate()
            .map(|(i, p)| (dist(p, o), i))
            .collect();
        counter.record_dists(ps.n() as u64);
        counter.record_touched(ps.n() as u64);
        partition_farthest(&mut pairs, plan.t);
        let pick = rng.gen_range(0..plan.t);
        return Ok(UasPick { index: pairs[pick].1, exact_mode: true });
    }
    let sample = sample_indices(ps.n(), plan.n_prime, rng);
    let mut pairs: Vec<(f64, usize)> = sample
        .into_iter()
        .map(|i| (dist_counted(ps.point(i), o, counter), i))
        .collect();
    if plan.t_prime < pairs.len() {
        partition_farthest(&mut pairs, plan.t_prime);
    }
    let pick = rng.gen_range(0..plan.t_prime);
    Ok(UasPick { index: pairs[pick].1, exact_mode: false })
}

/// A sandwich radius estimate.
#[derive(Debug, Clone, Copy)]
pub struct SandwichEstimate {
    pub size: f64,
    pub exact_mode: bool,
}

/// Sandwich estimation: the (t''+1)-th largest distance from a uniform
/// sample of n'' points to `o`. In exact mode the rank is taken over all
/// of P with t'' recomputed for sample size n.
pub fn sandwich_estimate(
    ps: &PointSet,
    o: &[f64],
    plan: &SamplingPlan,
    rng: &mut ChaCha8Rng,
    counter: &EvalCounter,
) -> Result<SandwichEstimate> {
    if plan.exact_sandwich {
        let dists: Vec<f64> = ps.iter().map(|p| dist(p, o)).collect();
        counter.record_dists(ps.n() as u64);
        counter.record_touched(ps.n() as u64);
        let size = kth_largest(&dists, plan.t_dprime_exact + 1)?;
        return Ok(SandwichEstimate { size, exact_mode: true });
    }
    let sample = sample_indices(ps.n(), plan.n_dprime, rng);
    let dists: Vec<f64> = sample
        .into_iter()
        .map(|i| dist_counted(ps.point(i), o, counter))
        .collect();
    let size = kth_largest(&dists, plan.t_dprime + 1)?;
    Ok(SandwichEstimate { size, exact_mode: false })
}

/// One linear-time trial: z rounds of exact far-set selection. Each round
/// records the candidate (o_i, l_i) where l_i is the exact (t+1)-th
/// largest distance, then adds a uniform member of the far set to the
/// core-set.
pub fn trial_linear(
    inst: &OutlierInstance,
    params: &BiCriteriaParams,
    stream: RngStream,
    counter: &EvalCounter,
) -> Result<TrialOutcome> {
    let ps = &inst.points;
    let n = ps.n();
    let t = far_count(n, inst.gamma, params.delta)?;
    let approx = params.approx();
    let mut rng = stream.rng();

    let mut coreset = vec![rng.gen_range(0..n)];
    counter.record_touched(1);
    let mut candidates = Vec::with_capacity(params.z);
    for round in 1..=params.z {
        let center = approx_center_indices(ps, &coreset, approx.inner_iters, counter);
        let mut pairs: Vec<(f64, usize)> = ps
            .iter()
            .enumerate()
            .map(|(i, p)| (dist(p, &center), i))
            .collect();
        counter.record_dists(n as u64);
        counter.record_touched(n as u64);
        let (threshold, _) = partition_farthest(&mut pairs, t);
        candidates.push(Candidate {
            center,
            size_estimate: threshold,
            round,
            origin: stream.stream,
        });
        let pick = rng.gen_range(0..t);
        coreset.push(pairs[pick].1);
    }
    let best = pick_best(&candidates);
    Ok(TrialOutcome { candidates, best, fallback: false })
}

/// One sub-linear trial: z rounds where the far-set selection runs through
/// [`uniform_adaptive_sample`] and the candidate radius through
/// [`sandwich_estimate`]. Its distance-evaluation count depends only on
/// (n', n'', z, inner iterations, |T|), never on n.
pub fn trial_sublinear(
    inst: &OutlierInstance,
    params: &BiCriteriaParams,
    plan: &SamplingPlan,
    stream: RngStream,
    counter: &EvalCounter,
) -> Result<TrialOutcome> {
    let ps = &inst.points;
    let approx = params.approx();
    let mut rng = stream.rng();

    let mut coreset = vec![rng.gen_range(0..ps.n())];
    counter.record_touched(1);
    let mut candidates = Vec::with_capacity(params.z);
    let mut fallback = false;
    for round in 1..=params.z {
        let center = approx_center_indices(ps, &coreset, approx.inner_iters, counter);
        let pick = uniform_adaptive_sample(ps, &center, plan, &mut rng, counter)?;
        coreset.push(pick.index);
        let est = sandwich_estimate(ps, &center, plan, &mut rng, counter)?;
        fallback |= pick.exact_mode || est.exact_mode;
        candidates.push(Candidate {
            center,
            size_estimate: est.size,
            round,
            origin: stream.stream,
        });
    }
    let best = pick_best(&candidates);
    Ok(TrialOutcome { candidates, best, fallback })
}

/// Exact coverage of a ball by full scan (closed ball).
pub fn scan_coverage(ps: &PointSet, ball: &Ball, counter: &EvalCounter) -> Coverage {
    let mut covered = 0;
    for p in ps.iter() {
        if dist(p, &ball.center) <= ball.radius {
            covered += 1;
        }
    }
    counter.record_dists(ps.n() as u64);
    counter.record_touched(ps.n() as u64);
    Coverage { covered, excluded: ps.n() - covered }
}

/// Single-shot linear solver: one trial plus the final exact scan.
pub fn algorithm1_linear(
    inst: &OutlierInstance,
    params: &BiCriteriaParams,
    stream: RngStream,
    counter: &EvalCounter,
) -> Result<SolutionReport> {
    let before = counter.snapshot();
    let outcome = trial_linear(inst, params, stream, counter)?;
    let trial_counts = counter.snapshot().since(&before);
    let ball = Ball { center: outcome.best.center.clone(), radius: outcome.best.size_estimate };
    let coverage = scan_coverage(&inst.points, &ball, counter);
    Ok(SolutionReport {
        ball,
        coverage: Some(coverage),
        counter: trial_counts,
        repetitions_used: 1,
        fallback: outcome.fallback,
    })
}

/// Single-shot sub-linear solver: one trial plus the final exact scan
/// (which is linear and reported outside the trial-phase counter).
pub fn algorithm2_sublinear(
    inst: &OutlierInstance,
    params: &BiCriteriaParams,
    stream: RngStream,
    counter: &EvalCounter,
) -> Result<SolutionReport> {
    let plan = SamplingPlan::new(params, inst.points.n(), inst.gamma)?;
    let before = counter.snapshot();
    let outcome = trial_sublinear(inst, params, &plan, stream, counter)?;
    let trial_counts = counter.snapshot().since(&before);
    let ball = Ball { center: outcome.best.center.clone(), radius: outcome.best.size_estimate };
    let coverage = scan_coverage(&inst.points, &ball, counter);
    Ok(SolutionReport {
        ball,
        coverage: Some(coverage),
        counter: trial_counts,
        repetitions_used: 1,
        fallback: outcome.fallback,
    })
}

/// Which trial the repetition wrapper runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    Linear,
    Sublinear,
}

/// Repetition policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RepeatMode {
    /// `params.repeats` trials.
    Fixed,
    /// ceil(c3/(1-gamma) (1+1/delta)^z) trials of the linear solver.
    TheoryLinear,
    /// ceil(c3/(1-gamma) ((1/(1-eta1))(3+3/delta))^z) trials of the
    /// sub-linear solver, with eta2 tightened to 1/(4 z N).
    TheorySublinear,
}

#[derive(Debug, Clone, Copy)]
pub struct RepeatConfig {
    pub mode: RepeatMode,
    /// Theory-mode repetition counts above this are rejected.
    pub budget: u64,
    pub parallel: bool,
    /// Run the final exact scan (linear work outside trial accounting).
    pub final_scan: bool,
    /// Constant in the theory-mode repetition counts.
    pub c3: f64,
}

impl Default for RepeatConfig {
    fn default() -> Self {
        RepeatConfig { mode: RepeatMode::Fixed, budget: 100_000, parallel: false, final_scan: true, c3: 3.0 }
    }
}

/// Theory-mode repetition count for the given solver, without rounding.
pub fn theory_repeats(kind: SolverKind, params: &BiCriteriaParams, gamma: f64, c3: f64) -> f64 {
    let base = match kind {
        SolverKind::Linear => 1.0 + 1.0 / params.delta,
        SolverKind::Sublinear => (3.0 + 3.0 / params.delta) / (1.0 - params.eta1),
    };
    (c3 / (1.0 - gamma)) * base.powi(params.z as i32)
}

/// Runs `repeats` independent trials on streams base..base+repeats-1 and
/// returns the candidate with the smallest estimated radius (ties by
/// repetition id, then round). The winner is re-scanned once for exact
/// coverage unless `final_scan` is off.
pub fn repeat_best(
    kind: SolverKind,
    inst: &OutlierInstance,
    params: &BiCriteriaParams,
    cfg: &RepeatConfig,
    stream: RngStream,
    counter: &EvalCounter,
) -> Result<SolutionReport> {
    let mut eff = *params;
    let repeats = match cfg.mode {
        RepeatMode::Fixed => params.repeats.max(1),
        RepeatMode::TheoryLinear | RepeatMode::TheorySublinear => {
            let required = theory_repeats(kind, params, inst.gamma, cfg.c3).ceil();
            if !(required <= cfg.budget as f64) {
                return Err(Error::Budget { required, budget: cfg.budget });
            }
            let n_rep = required as usize;
            if cfg.mode == RepeatMode::TheorySublinear {
                eff.eta2 = 1.0 / (4.0 * params.z as f64 * n_rep as f64);
            }
            n_rep
        }
    };
    let plan = match kind {
        SolverKind::Sublinear => Some(SamplingPlan::new(&eff, inst.points.n(), inst.gamma)?),
        SolverKind::Linear => None,
    };

    let run_trial = |rep: u64| -> Result<TrialOutcome> {
        let trial_stream = stream.offset(rep);
        match kind {
            SolverKind::Linear => trial_linear(inst, &eff, trial_stream, counter),
            SolverKind::Sublinear => {
                trial_sublinear(inst, &eff, plan.as_ref().expect("plan"), trial_stream, counter)
            }
        }
    };

    let before = counter.snapshot();
    let outcomes: Vec<TrialOutcome> = if cfg.parallel {
        (0..repeats as u64)
            .into_par_iter()
            .map(run_trial)
            .collect::<Result<Vec<_>>>()?
    } else {
        (0..repeats as u64).map(run_trial).collect::<Result<Vec<_>>>()?
    };
    let trial_counts = counter.snapshot().since(&before);

    let fallback = outcomes.iter().any(|o| o.fallback);
    let bests: Vec<Candidate> = outcomes.into_iter().map(|o| o.best).collect();
    let winner = pick_best(&bests);
    let ball = Ball { center: winner.center.clone(), radius: winner.size_estimate };
    let coverage = cfg.final_scan.then(|| scan_coverage(&inst.points, &ball, counter));
    Ok(SolutionReport {
        ball,
        coverage,
        counter: trial_counts,
        repetitions_used: repeats,
        fallback,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{gen_planted_meb, PlantedOptimum};
    use crate::oracles::{oracle_meb_outliers_bruteforce, oracle_meb_reference};

    fn params(eps: f64, delta: f64) -> BiCriteriaParams {
        BiCriteriaParams::new(eps, delta, 0.1, 0.1).unwrap()
    }

    #[test]
    fn far_count_clamps_and_validates() {
        assert_eq!(far_count(100, 0.0, 0.5).unwrap(), 1);
        assert_eq!(far_count(100, 0.1, 0.5).unwrap(), 15);
        assert!(far_count(10, 0.9, 0.5).is_err());
    }

    #[test]
    fn plan_ranks() {
        let p = params(0.5, 0.25);
        let plan = SamplingPlan::new(&p, 100_000, 0.1).unwrap();
        assert_eq!(plan.t, 12_500);
        assert!(plan.t_prime <= plan.n_prime);
        assert!(plan.t_dprime < plan.n_dprime);
        assert!(!plan.exact_uas && !plan.exact_sandwich);
        // Small n forces both exact modes.
        let plan = SamplingPlan::new(&p, 10, 0.1).unwrap();
        assert!(plan.exact_uas && plan.exact_sandwich);
    }

    #[test]
    fn plan_rejects_large_delta() {
        let p = params(0.5, 0.4);
        assert!(SamplingPlan::new(&p, 1000, 0.1).is_err());
    }

    #[test]
    fn sandwich_exact_two_shell() {
        // 90 points at distance 1, 10 at distance 10: with gamma=0.1,
        // delta=0.2 the exact rank is 16, so the estimate equals 1.
        let mut rows = vec![];
        for i in 0..90 {
            let angle = i as f64;
            rows.push(vec![angle.cos(), angle.sin()]);
        }
        for i in 0..10 {
            let angle = 0.37 * i as f64;
            rows.push(vec![10.0 * angle.cos(), 10.0 * angle.sin()]);
        }
        let ps = PointSet::new(rows).unwrap();
        let p = params(0.5, 0.2);
        let mut plan = SamplingPlan::new(&p, ps.n(), 0.1).unwrap();
        assert_eq!(plan.t_dprime_exact, 15);
        plan.exact_sandwich = true;
        let counter = EvalCounter::new();
        let est = sandwich_estimate(&ps, &[0.0, 0.0], &plan, &mut RngStream::from_seed(1).rng(), &counter)
            .unwrap();
        assert!((est.size - 1.0).abs() < 1e-12);
        assert!(est.exact_mode);
        // Exclusion of the estimated ball: the 10 far points, below the cap.
        let excluded = ps.iter().filter(|q| dist(q, &[0.0, 0.0]) > est.size).count();
        assert_eq!(excluded, 10);
        assert!(excluded as f64 <= p.exclusion_cap(0.1, ps.n()));
    }

    #[test]
    fn sandwich_identical_points() {
        let ps = PointSet::new(vec![vec![2.0, 0.0]; 40]).unwrap();
        let p = params(0.5, 0.2);
        let plan = SamplingPlan::new(&p, ps.n(), 0.1).unwrap();
        let counter = EvalCounter::new();
        let est =
            sandwich_estimate(&ps, &[2.0, 0.0], &plan, &mut RngStream::from_seed(2).rng(), &counter)
                .unwrap();
        assert_eq!(est.size, 0.0);
    }

    #[test]
    fn uas_exact_mode_picks_from_true_far_set() {
        let inst = gen_planted_meb(10, 2, 0.1, 1.0, 5.0, 21).unwrap();
        let p = params(0.5, 0.25);
        let plan = SamplingPlan::new(&p, 10, 0.1).unwrap();
        assert!(plan.exact_uas);
        let center = match &inst.truth.as_ref().unwrap().optimum {
            PlantedOptimum::Ball { center, .. } => center.clone(),
            _ => unreachable!(),
        };
        // The true far set under t' ranking: exact mode picks from the
        // t farthest, a subset of the t' farthest.
        let mut pairs: Vec<(f64, usize)> = inst
            .points
            .iter()
            .enumerate()
            .map(|(i, q)| (dist(q, &center), i))
            .collect();
        pairs.sort_by(|a, b| crate::geometry::rank_desc(a, b));
        let t_prime_far: Vec<usize> =
            pairs.iter().take(plan.t_prime.min(10)).map(|&(_, i)| i).collect();
        let counter = EvalCounter::new();
        for s in 0..20 {
            let pick = uniform_adaptive_sample(
                &inst.points,
                &center,
                &plan,
                &mut RngStream::from_seed(s).rng(),
                &counter,
            )
            .unwrap();
            assert!(pick.exact_mode);
            assert!(t_prime_far.contains(&pick.index));
        }
    }

    #[test]
    fn uas_single_extreme_outlier_frequency() {
        // One extreme point; with t = 1 the sample's far set contains it
        // exactly when the sample does.
        let n = 50usize;
        let mut rows: Vec<Vec<f64>> = (0..n - 1)
            .map(|i| vec![(i as f64 * 0.01).cos(), (i as f64 * 0.01).sin()])
            .collect();
        rows.push(vec![100.0, 0.0]);
        let ps = PointSet::new(rows).unwrap();
        let p = params(0.5, 0.25);
        let plan = SamplingPlan {
            n_prime: 20,
            n_dprime: 20,
            t: 1,
            t_prime: 1,
            t_dprime: 1,
            t_dprime_exact: 1,
            exact_uas: false,
            exact_sandwich: false,
            n,
        };
        let _ = p;
        let trials = 10_000usize;
        let mut hits = 0usize;
        let counter = EvalCounter::new();
        let mut rng = RngStream::from_seed(5).rng();
        for _ in 0..trials {
            let pick =
                uniform_adaptive_sample(&ps, &[0.0, 0.0], &plan, &mut rng, &counter).unwrap();
            if pick.index == n - 1 {
                hits += 1;
            }
        }
        let expect = 1.0 - (1.0 - 1.0 / n as f64).powi(plan.n_prime as i32);
        let rate = hits as f64 / trials as f64;
        let sigma = (expect * (1.0 - expect) / trials as f64).sqrt();
        assert!(
            (rate - expect).abs() <= 5.0 * sigma,
            "rate {rate} vs binomial {expect} (sigma {sigma})"
        );
    }

    #[test]
    fn alg1_identical_points() {
        let ps = PointSet::new(vec![vec![1.0, 1.0]; 30]).unwrap();
        let inst = OutlierInstance::new(ps, 0.1).unwrap();
        let p = params(0.5, 0.5);
        let report =
            algorithm1_linear(&inst, &p, RngStream::from_seed(3), &EvalCounter::new()).unwrap();
        assert_eq!(report.ball.radius, 0.0);
        assert_eq!(report.coverage.unwrap().covered, 30);
    }

    #[test]
    fn alg2_identical_points() {
        let ps = PointSet::new(vec![vec![1.0, 1.0]; 30]).unwrap();
        let inst = OutlierInstance::new(ps, 0.1).unwrap();
        let p = params(0.5, 0.25);
        let report =
            algorithm2_sublinear(&inst, &p, RngStream::from_seed(3), &EvalCounter::new()).unwrap();
        assert_eq!(report.ball.radius, 0.0);
        assert_eq!(report.coverage.unwrap().covered, 30);
    }

    #[test]
    fn alg1_small_planted_vs_bruteforce() {
        let gamma = 2.0 / 12.0;
        let mut ok = 0;
        for seed in 0..8u64 {
            let inst = gen_planted_meb(12, 2, gamma, 1.0, 5.0, 100 + seed).unwrap();
            let (opt, _) = oracle_meb_outliers_bruteforce(&inst.points, gamma).unwrap();
            let p = params(0.5, 0.5).with_repeats(200);
            let counter = EvalCounter::new();
            let report = repeat_best(
                SolverKind::Linear,
                &inst,
                &p,
                &RepeatConfig::default(),
                RngStream::from_seed(seed),
                &counter,
            )
            .unwrap();
            let cov = report.coverage.unwrap();
            let t = far_count(12, gamma, p.delta).unwrap();
            assert!(cov.excluded <= t, "excluded {} > t {t}", cov.excluded);
            if report.ball.radius <= 1.5 * opt + 1e-9 {
                ok += 1;
            }
        }
        assert!(ok >= 7, "only {ok}/8 instances met the radius bound");
    }

    #[test]
    fn alg2_planted_medium() {
        let inst = gen_planted_meb(2000, 20, 0.1, 1.0, 10.0, 55).unwrap();
        let truth_radius = match inst.truth.as_ref().unwrap().optimum {
            PlantedOptimum::Ball { radius, .. } => radius,
            _ => unreachable!(),
        };
        let inlier_rows: Vec<Vec<f64>> = inst.truth.as_ref().unwrap().inliers.iter()
            .map(|&i| inst.points.point(i).to_vec())
            .collect();
        let rho_ref = oracle_meb_reference(&PointSet::new(inlier_rows).unwrap(), None).radius;
        assert!(rho_ref <= truth_radius + 1e-9);

        let p = params(0.5, 0.25).with_repeats(30);
        let counter = EvalCounter::new();
        let report = repeat_best(
            SolverKind::Sublinear,
            &inst,
            &p,
            &RepeatConfig::default(),
            RngStream::from_seed(7),
            &counter,
        )
        .unwrap();
        let cov = report.coverage.unwrap();
        assert!(
            report.ball.radius <= 1.5 * rho_ref + 1e-9,
            "radius {} vs 1.5 * {rho_ref}",
            report.ball.radius
        );
        assert!(cov.excluded as f64 <= p.exclusion_cap(0.1, 2000));
    }

    #[test]
    fn sublinear_counter_independent_of_n() {
        let p = params(0.5, 0.25);
        let mut counts = vec![];
        for n in [2_000usize, 8_000, 32_000] {
            let inst = gen_planted_meb(n, 5, 0.1, 1.0, 10.0, 9).unwrap();
            let plan = SamplingPlan::new(&p, n, 0.1).unwrap();
            let counter = EvalCounter::new();
            trial_sublinear(&inst, &p, &plan, RngStream::from_seed(4), &counter).unwrap();
            counts.push(counter.snapshot().distance_evals);
        }
        assert_eq!(counts[0], counts[1]);
        assert_eq!(counts[1], counts[2]);
        // z(n' + n'') plus the inner-solver term sum_{i<=z} i * inner_iters.
        let plan = SamplingPlan::new(&p, 32_000, 0.1).unwrap();
        let inner = p.approx().inner_iters;
        let z = p.z as u64;
        let expect = z * (plan.n_prime + plan.n_dprime) as u64 + inner * (z * (z + 1)) / 2;
        assert_eq!(counts[0], expect);
    }

    #[test]
    fn exact_fallback_matches_linear_centers() {
        let inst = gen_planted_meb(12, 3, 1.0 / 12.0, 1.0, 5.0, 17).unwrap();
        let p = params(0.5, 0.25);
        let plan = SamplingPlan::new(&p, 12, inst.gamma).unwrap();
        assert!(plan.exact_uas && plan.exact_sandwich);
        for seed in 0..6 {
            let s = RngStream::from_seed(seed);
            let lin = trial_linear(&inst, &p, s, &EvalCounter::new()).unwrap();
            let sub = trial_sublinear(&inst, &p, &plan, s, &EvalCounter::new()).unwrap();
            for (a, b) in lin.candidates.iter().zip(&sub.candidates) {
                assert_eq!(a.center, b.center, "seed {seed} round {}", a.round);
            }
        }
    }

    #[test]
    fn repeat_best_argmin_and_determinism() {
        let inst = gen_planted_meb(500, 8, 0.1, 1.0, 10.0, 23).unwrap();
        let p = params(0.5, 0.25).with_repeats(6);
        let cfg = RepeatConfig::default();
        let a = repeat_best(SolverKind::Sublinear, &inst, &p, &cfg, RngStream::from_seed(1), &EvalCounter::new())
            .unwrap();
        let b = repeat_best(SolverKind::Sublinear, &inst, &p, &cfg, RngStream::from_seed(1), &EvalCounter::new())
            .unwrap();
        assert_eq!(a.ball, b.ball);
        let par = RepeatConfig { parallel: true, ..cfg };
        let c = repeat_best(SolverKind::Sublinear, &inst, &p, &par, RngStream::from_seed(1), &EvalCounter::new())
            .unwrap();
        assert_eq!(a.ball, c.ball);
        // repeats = 1 equals the single trial.
        let p1 = p.with_repeats(1);
        let single = repeat_best(SolverKind::Sublinear, &inst, &p1, &cfg, RngStream::from_seed(1), &EvalCounter::new())
            .unwrap();
        let direct =
            algorithm2_sublinear(&inst, &p1, RngStream::from_seed(1), &EvalCounter::new()).unwrap();
        assert_eq!(single.ball, direct.ball);
    }

    #[test]
    fn repeat_best_budget_error() {
        let inst = gen_planted_meb(100, 3, 0.1, 1.0, 10.0, 2).unwrap();
        // delta small enough that the theory count explodes.
        let p = BiCriteriaParams::new(0.2, 0.05, 0.1, 0.1).unwrap();
        let cfg = RepeatConfig { mode: RepeatMode::TheoryLinear, ..RepeatConfig::default() };
        match repeat_best(SolverKind::Linear, &inst, &p, &cfg, RngStream::from_seed(0), &EvalCounter::new()) {
            Err(Error::Budget { required, budget }) => {
                assert!(required > budget as f64);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn scaling_leaves_argmin_invariant() {
        let inst = gen_planted_meb(800, 10, 0.1, 1.0, 10.0, 31).unwrap();
        let p = params(0.5, 0.25);
        let plan = SamplingPlan::new(&p, 800, 0.1).unwrap();
        let base = trial_sublinear(&inst, &p, &plan, RngStream::from_seed(12), &EvalCounter::new())
            .unwrap();
        let scaled_inst = OutlierInstance::new(inst.points.scaled(4.0), 0.1).unwrap();
        let scaled = trial_sublinear(&scaled_inst, &p, &plan, RngStream::from_seed(12), &EvalCounter::new())
            .unwrap();
        assert_eq!(base.best.round, scaled.best.round);
        // Power-of-two scaling is exact in IEEE arithmetic.
        assert_eq!(scaled.best.size_estimate, 4.0 * base.best.size_estimate);
        for (a, b) in base.candidates.iter().zip(&scaled.candidates) {
            assert_eq!(b.size_estimate, 4.0 * a.size_estimate);
        }
    }
}
