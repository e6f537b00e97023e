//! Planted-instance generators and the lower-bound construction.
//!
//! Every generator records the planted feasible optimum and re-verifies it
//! by a full scan before returning, so acceptance tests can phrase their
//! inequalities against a sound upper bound.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{dist, kth_largest, Point, PointSet, RngStream};
use crate::outliers::OutlierInstance;
use crate::svm::TwoClassInstance;

/// The planted feasible optimum of a generated instance.
#[derive(Debug, Clone)]
pub enum PlantedOptimum {
    Ball { center: Point, radius: f64 },
    KCenter { centers: Vec<Point>, radius: f64 },
    Line { anchor: Point, direction: Point, width: f64 },
    /// One-class margin: every inlier projects at least `margin` onto
    /// `direction`.
    Margin { direction: Point, margin: f64 },
}

/// Ground truth attached to a planted instance: the feasible optimum and
/// the exact inlier index set. Planted optima are feasibility upper
/// bounds, not exact optima.
#[derive(Debug, Clone)]
pub struct PlantedTruth {
    pub optimum: PlantedOptimum,
    pub inliers: Vec<usize>,
}

impl PlantedTruth {
    pub fn inlier_mask(&self, n: usize) -> Vec<bool> {
        let mut mask = vec![false; n];
        for &i in &self.inliers {
            mask[i] = true;
        }
        mask
    }
}

/// Ground truth for a planted two-class SVM instance.
#[derive(Debug, Clone)]
pub struct PlantedTwoClass {
    pub direction: Point,
    pub margin: f64,
    pub inliers1: Vec<usize>,
    pub inliers2: Vec<usize>,
}

pub(crate) fn random_unit_vector(d: usize, rng: &mut ChaCha8Rng) -> Point {
    loop {
        // Box-Muller pairs; rejection only guards against the tiny-norm case.
        let v: Vec<f64> = (0..d)
            .map(|_| {
                let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
                let u2: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                (-2.0 * u1.ln()).sqrt() * u2.cos()
            })
            .collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Uniform draw from the unit ball.
pub(crate) fn random_in_unit_ball(d: usize, rng: &mut ChaCha8Rng) -> Point {
    let dir = random_unit_vector(d, rng);
    let r: f64 = rng.gen_range(0.0..1.0f64).powf(1.0 / d as f64);
    dir.into_iter().map(|x| x * r).collect()
}

fn split_counts(n: usize, gamma: f64) -> Result<(usize, usize)> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::Input(format!("gamma must be in [0,1), got {gamma}")));
    }
    let keep = ((1.0 - gamma) * n as f64).ceil() as usize;
    if keep == 0 || keep > n {
        return Err(Error::input("degenerate inlier count"));
    }
    Ok((keep, n - keep))
}

/// MEB-with-outliers instance: `(1-gamma)n` inliers uniform in a ball of
/// radius `r_in`, the rest on the sphere of radius `beta * r_in` about the
/// same center. Inliers occupy indices `0..keep`.
pub fn gen_planted_meb(
    n: usize,
    d: usize,
    gamma: f64,
    r_in: f64,
    beta: f64,
    seed: u64,
) -> Result<OutlierInstance> {
    if n == 0 || d == 0 {
        return Err(Error::input("n and d must be positive"));
    }
    if r_in <= 0.0 {
        return Err(Error::input("r_in must be positive"));
    }
    let (keep, out) = split_counts(n, gamma)?;
    if out > 0 && beta <= 2.0 {
        return Err(Error::Input(format!("beta must exceed 2 for unambiguous outliers, got {beta}")));
    }
    let mut rng = RngStream::new(seed, 0).rng();
    let center: Point = (0..d).map(|_| rng.gen_range(-5.0..5.0)).collect();
    let mut rows: Vec<Point> = Vec::with_capacity(n);
    for _ in 0..keep {
        let offset = random_in_unit_ball(d, &mut rng);
        rows.push((0..d).map(|j| center[j] + r_in * offset[j]).collect());
    }
    for _ in 0..out {
        let dir = random_unit_vector(d, &mut rng);
        rows.push((0..d).map(|j| center[j] + beta * r_in * dir[j]).collect());
    }
    let points = PointSet::new(rows)?;
    // Feasibility self-check.
    for i in 0..keep {
        debug_assert!(dist(points.point(i), &center) <= r_in * (1.0 + 1e-12));
    }
    let truth = PlantedTruth {
        optimum: PlantedOptimum::Ball { center, radius: r_in },
        inliers: (0..keep).collect(),
    };
    OutlierInstance::with_truth(points, gamma, truth)
}

/// The three-cluster construction showing no single-criterion factor below
/// 2 is possible sub-linearly: one point at `q_a`, `(1-gamma)n - 1` points
/// at `q_b = q_a + x`, and `gamma*n` points at `q_c = q_b + y`, all on a
/// line. The optimal radius is `x/2` with `P_opt = P_a + P_b`.
pub fn gen_lower_bound(n: usize, gamma: f64, x: f64, y: f64) -> Result<OutlierInstance> {
    if !(x > 0.0 && y >= 10.0 * x) {
        return Err(Error::Input(format!("need 0 < x and y >= 10x, got x={x} y={y}")));
    }
    let out_f = gamma * n as f64;
    let out = out_f.round() as usize;
    if (out_f - out as f64).abs() > 1e-9 || out == 0 {
        return Err(Error::Input(format!("gamma*n must be a positive integer, got {out_f}")));
    }
    let keep = n - out;
    if keep < 2 {
        return Err(Error::input("need at least two inliers"));
    }
    let mut rows: Vec<Point> = Vec::with_capacity(n);
    rows.push(vec![0.0]);
    rows.extend(std::iter::repeat(vec![x]).take(keep - 1));
    rows.extend(std::iter::repeat(vec![x + y]).take(out));
    let points = PointSet::new(rows)?;
    let truth = PlantedTruth {
        optimum: PlantedOptimum::Ball { center: vec![x / 2.0], radius: x / 2.0 },
        inliers: (0..keep).collect(),
    };
    OutlierInstance::with_truth(points, gamma, truth)
}

/// For a center inside conv(P_b + P_c) — the only region a sample that
/// misses `q_a` can produce — returns the ratio between the radius needed
/// to cover `(1-gamma)n` points and the optimal radius `x/2`.
pub fn verify_lower_bound(inst: &OutlierInstance, center: &[f64]) -> Result<f64> {
    let ps = &inst.points;
    let truth = inst
        .truth
        .as_ref()
        .ok_or_else(|| Error::input("instance lacks planted truth"))?;
    let opt = match &truth.optimum {
        PlantedOptimum::Ball { radius, .. } => *radius,
        _ => return Err(Error::input("not a lower-bound instance")),
    };
    // Hull of P_b + P_c: every point except index 0.
    let lo = ps.point(1)[0];
    let hi = ps.point(ps.n() - 1)[0];
    if center.len() != ps.dim() || center[0] < lo - 1e-9 || center[0] > hi + 1e-9 {
        return Err(Error::input("center outside conv(P_b + P_c)"));
    }
    let keep = truth.inliers.len();
    let dists: Vec<f64> = ps.iter().map(|p| dist(p, center)).collect();
    // Radius covering `keep` points = the keep-th smallest distance.
    let needed = kth_largest(&dists, ps.n() - keep + 1)?;
    Ok(needed / opt)
}

/// k-center instance: k unit-radius clusters with pairwise-separated
/// centers, plus outliers on a distant sphere around the layout midpoint.
pub fn gen_planted_kcenter(
    n: usize,
    d: usize,
    k: usize,
    gamma: f64,
    r_in: f64,
    separation: f64,
    outlier_dist: f64,
    seed: u64,
) -> Result<OutlierInstance> {
    if k == 0 || d == 0 {
        return Err(Error::input("k and d must be positive"));
    }
    if separation <= 4.0 * r_in {
        return Err(Error::input("separation must exceed 4*r_in for distinct clusters"));
    }
    let (keep, out) = split_counts(n, gamma)?;
    if keep < k {
        return Err(Error::input("fewer inliers than clusters"));
    }
    if out > 0 && outlier_dist <= separation * (k as f64) {
        return Err(Error::input("outlier_dist must exceed the cluster layout span"));
    }
    let mut rng = RngStream::new(seed, 1).rng();
    let base: Point = (0..d).map(|_| rng.gen_range(-5.0..5.0)).collect();
    let centers: Vec<Point> = (0..k)
        .map(|j| {
            let mut c = base.clone();
            c[0] += separation * j as f64;
            c
        })
        .collect();
    let mut midpoint = base.clone();
    midpoint[0] += separation * (k as f64 - 1.0) / 2.0;

    let mut rows: Vec<Point> = Vec::with_capacity(n);
    for i in 0..keep {
        let c = &centers[i % k];
        let offset = random_in_unit_ball(d, &mut rng);
        rows.push((0..d).map(|j| c[j] + r_in * offset[j]).collect());
    }
    for _ in 0..out {
        let dir = random_unit_vector(d, &mut rng);
        rows.push((0..d).map(|j| midpoint[j] + outlier_dist * dir[j]).collect());
    }
    let points = PointSet::new(rows)?;
    let truth = PlantedTruth {
        optimum: PlantedOptimum::KCenter { centers, radius: r_in },
        inliers: (0..keep).collect(),
    };
    OutlierInstance::with_truth(points, gamma, truth)
}

/// Line-fitting instance: inliers within distance `width` of a random
/// line, outliers displaced `outlier_dist` perpendicular to it. Needs d >= 2.
pub fn gen_planted_line(
    n: usize,
    d: usize,
    gamma: f64,
    width: f64,
    length: f64,
    outlier_dist: f64,
    seed: u64,
) -> Result<OutlierInstance> {
    if d < 2 {
        return Err(Error::input("line fitting needs d >= 2"));
    }
    if !(width > 0.0 && length > 0.0 && outlier_dist > 4.0 * width) {
        return Err(Error::input("need width, length > 0 and outlier_dist > 4*width"));
    }
    let (keep, out) = split_counts(n, gamma)?;
    let mut rng = RngStream::new(seed, 2).rng();
    let anchor: Point = (0..d).map(|_| rng.gen_range(-5.0..5.0)).collect();
    let direction = random_unit_vector(d, &mut rng);

    let mut perp = |rng: &mut ChaCha8Rng| -> Point {
        // Unit vector orthogonal to `direction`.
        loop {
            let g = random_unit_vector(d, rng);
            let along: f64 = g.iter().zip(&direction).map(|(a, b)| a * b).sum();
            let v: Vec<f64> = g.iter().zip(&direction).map(|(a, b)| a - along * b).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-9 {
                return v.into_iter().map(|x| x / norm).collect();
            }
        }
    };

    let mut rows: Vec<Point> = Vec::with_capacity(n);
    for _ in 0..keep {
        let t: f64 = rng.gen_range(-length / 2.0..length / 2.0);
        let p = perp(&mut rng);
        let w: f64 = width * rng.gen_range(0.0..1.0f64).powf(1.0 / (d as f64 - 1.0).max(1.0));
        rows.push((0..d).map(|j| anchor[j] + t * direction[j] + w * p[j]).collect());
    }
    for _ in 0..out {
        let t: f64 = rng.gen_range(-length / 2.0..length / 2.0);
        let p = perp(&mut rng);
        rows.push((0..d).map(|j| anchor[j] + t * direction[j] + outlier_dist * p[j]).collect());
    }
    let points = PointSet::new(rows)?;
    // Self-check: inliers within width of the planted line.
    for i in 0..keep {
        debug_assert!(line_dist(&anchor, &direction, points.point(i)) <= width * (1.0 + 1e-9));
    }
    let truth = PlantedTruth {
        optimum: PlantedOptimum::Line { anchor, direction, width },
        inliers: (0..keep).collect(),
    };
    OutlierInstance::with_truth(points, gamma, truth)
}

pub(crate) fn line_dist(anchor: &[f64], direction: &[f64], p: &[f64]) -> f64 {
    let along: f64 = p
        .iter()
        .zip(anchor)
        .zip(direction)
        .map(|((x, a), u)| (x - a) * u)
        .sum();
    p.iter()
        .zip(anchor)
        .zip(direction)
        .map(|((x, a), u)| {
            let r = (x - a) - along * u;
            r * r
        })
        .sum::<f64>()
        .sqrt()
}

/// One-class SVM instance: inliers project at least 1 onto e1 with norm at
/// most 3; outliers sit behind the origin at projection -1.
pub fn gen_planted_svm1(n: usize, d: usize, gamma: f64, seed: u64) -> Result<OutlierInstance> {
    if d < 2 {
        return Err(Error::input("planted SVM needs d >= 2"));
    }
    let (keep, out) = split_counts(n, gamma)?;
    let mut rng = RngStream::new(seed, 3).rng();
    let mut rows: Vec<Point> = Vec::with_capacity(n);
    for i in 0..keep {
        let x1: f64 = if i == 0 { 1.0 } else { rng.gen_range(1.0..2.0) };
        let budget = (9.0 - x1 * x1).sqrt() * 0.99;
        let tail_norm: f64 = budget * rng.gen_range(0.0..1.0f64).powf(1.0 / (d as f64 - 1.0));
        let tail_dir = random_unit_vector(d - 1, &mut rng);
        let mut p = vec![x1];
        p.extend(tail_dir.into_iter().map(|x| x * tail_norm));
        rows.push(p);
    }
    for _ in 0..out {
        let tail_dir = random_unit_vector(d - 1, &mut rng);
        let tail_norm: f64 = rng.gen_range(0.0..1.0);
        let mut p = vec![-1.0];
        p.extend(tail_dir.into_iter().map(|x| x * tail_norm));
        rows.push(p);
    }
    let points = PointSet::new(rows)?;
    let mut direction = vec![0.0; d];
    direction[0] = 1.0;
    let truth = PlantedTruth {
        optimum: PlantedOptimum::Margin { direction, margin: 1.0 },
        inliers: (0..keep).collect(),
    };
    OutlierInstance::with_truth(points, gamma, truth)
}

/// Mirrored two-class SVM instance with inlier hulls exactly `margin`
/// apart along e1 and cross-side outliers in each class.
pub fn gen_planted_svm2(
    n1: usize,
    n2: usize,
    d: usize,
    gamma1: f64,
    gamma2: f64,
    margin: f64,
    seed: u64,
) -> Result<TwoClassInstance> {
    if d < 2 {
        return Err(Error::input("planted SVM needs d >= 2"));
    }
    if margin <= 0.0 {
        return Err(Error::input("margin must be positive"));
    }
    let (keep1, out1) = split_counts(n1, gamma1)?;
    let (keep2, out2) = split_counts(n2, gamma2)?;
    let mut rng = RngStream::new(seed, 4).rng();
    let half = margin / 2.0;

    let mut gen_class = |keep: usize, out: usize, sign: f64, rng: &mut ChaCha8Rng| -> Vec<Point> {
        let mut rows = Vec::with_capacity(keep + out);
        for i in 0..keep {
            let x1: f64 = if i == 0 { half } else { rng.gen_range(half..half + 1.0) };
            let tail_dir = random_unit_vector(d - 1, rng);
            let tail_norm: f64 = 2.0 * rng.gen_range(0.0..1.0f64).powf(1.0 / (d as f64 - 1.0));
            let mut p = vec![sign * x1];
            p.extend(tail_dir.into_iter().map(|x| x * tail_norm));
            rows.push(p);
        }
        for _ in 0..out {
            // Cross-side outlier.
            let tail_dir = random_unit_vector(d - 1, rng);
            let tail_norm: f64 = rng.gen_range(0.0..1.0);
            let mut p = vec![-sign * (half + 1.0)];
            p.extend(tail_dir.into_iter().map(|x| x * tail_norm));
            rows.push(p);
        }
        rows
    };

    let rows1 = gen_class(keep1, out1, 1.0, &mut rng);
    let rows2 = gen_class(keep2, out2, -1.0, &mut rng);
    let mut direction = vec![0.0; d];
    direction[0] = 1.0;
    let truth = PlantedTwoClass {
        direction,
        margin,
        inliers1: (0..keep1).collect(),
        inliers2: (0..keep2).collect(),
    };
    TwoClassInstance::with_truth(
        PointSet::new(rows1)?,
        PointSet::new(rows2)?,
        gamma1,
        gamma2,
        truth,
    )
}
