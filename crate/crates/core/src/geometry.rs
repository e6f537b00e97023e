//! Points, Euclidean distances, order-statistic selection, seeded
//! randomness, and the distance-evaluation counter shared by all solvers.
//!
//! Every randomized operation is a pure function of its inputs and an
//! [`RngStream`]; ties are broken by smallest index throughout.

use std::sync::atomic::{AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A point is a row of `d` finite coordinates.
pub type Point = Vec<f64>;

/// An immutable set of `n` points in `R^d`, stored row-major.
///
/// Index order (0..n-1) is stable and is the deterministic tie-break for
/// every selection in this crate.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    data: Vec<f64>,
    n: usize,
    d: usize,
}

impl PointSet {
    pub fn new(rows: Vec<Point>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::input("point set must contain at least one point"));
        }
        let d = rows[0].len();
        if d == 0 {
            return Err(Error::input("dimension must be at least 1"));
        }
        let mut data = Vec::with_capacity(rows.len() * d);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(Error::Input(format!(
                    "point {i} has dimension {} but expected {d}",
                    row.len()
                )));
            }
            if row.iter().any(|x| !x.is_finite()) {
                return Err(Error::Input(format!("point {i} has a non-finite coordinate")));
            }
            data.extend_from_slice(row);
        }
        Ok(PointSet { n: rows.len(), d, data })
    }

    /// Builds a set from a flat row-major buffer of `n*d` values.
    pub fn from_flat(data: Vec<f64>, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::input("dimension must be at least 1"));
        }
        if data.is_empty() || data.len() % d != 0 {
            return Err(Error::Input(format!(
                "flat buffer of length {} is not a non-empty multiple of d={d}",
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::Input(format!("non-finite coordinate at offset {i}")));
        }
        Ok(PointSet { n: data.len() / d, d, data })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.d)
    }

    /// Copy of the set with every coordinate multiplied by `alpha`.
    pub fn scaled(&self, alpha: f64) -> PointSet {
        PointSet {
            data: self.data.iter().map(|x| x * alpha).collect(),
            n: self.n,
            d: self.d,
        }
    }

    /// Copy of the set with `offset` subtracted from every point.
    pub fn translated(&self, offset: &[f64]) -> PointSet {
        let mut data = self.data.clone();
        for row in data.chunks_exact_mut(self.d) {
            for (x, o) in row.iter_mut().zip(offset) {
                *x -= o;
            }
        }
        PointSet { data, n: self.n, d: self.d }
    }
}

/// Seed + stream id for a reproducible ChaCha8 draw sequence.
///
/// The same `(seed, stream)` pair always yields the identical sequence;
/// distinct stream ids are independent for practical purposes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngStream {
    pub seed: u64,
    pub stream: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        RngStream { seed, stream }
    }

    /// Stream 0 of the given seed.
    pub fn from_seed(seed: u64) -> Self {
        RngStream { seed, stream: 0 }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }

    /// Stream whose id is offset by `i` (repetition i uses stream base+i).
    pub fn offset(&self, i: u64) -> RngStream {
        RngStream { seed: self.seed, stream: self.stream.wrapping_add(i) }
    }

    /// Derived independent stream for nested fan-out (branches inside
    /// repetitions). Mixes the tag so children of different parents differ.
    pub fn child(&self, tag: u64) -> RngStream {
        RngStream { seed: self.seed, stream: splitmix64(self.stream ^ tag.wrapping_mul(0x9e3779b97f4a7c15)) }
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

/// Counts distance-function evaluations and raw point reads.
///
/// Counts are monotone within a run; concurrent workers may update the same
/// counter and the final totals equal the serial sum.
#[derive(Debug, Default)]
pub struct EvalCounter {
    distance_evals: AtomicU64,
    points_touched: AtomicU64,
}

/// A plain copy of counter totals at some instant.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CounterSnapshot {
    pub distance_evals: u64,
    pub points_touched: u64,
}

impl EvalCounter {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn record_dists(&self, k: u64) {
        self.distance_evals.fetch_add(k, Ordering::Relaxed);
    }

    #[inline]
    pub fn record_touched(&self, k: u64) {
        self.points_touched.fetch_add(k, Ordering::Relaxed);
    }

    pub fn snapshot(&self) -> CounterSnapshot {
        CounterSnapshot {
            distance_evals: self.distance_evals.load(Ordering::Relaxed),
            points_touched: self.points_touched.load(Ordering::Relaxed),
        }
    }
}

impl CounterSnapshot {
    /// Difference since an earlier snapshot of the same counter.
    pub fn since(&self, earlier: &CounterSnapshot) -> CounterSnapshot {
        CounterSnapshot {
            distance_evals: self.distance_evals - earlier.distance_evals,
            points_touched: self.points_touched - earlier.points_touched,
        }
    }
}

#[inline]
pub fn sq_dist(p: &[f64], q: &[f64]) -> f64 {
    debug_assert_eq!(p.len(), q.len());
    let mut acc = 0.0;
    for i in 0..p.len() {
        let diff = p[i] - q[i];
        acc += diff * diff;
    }
    acc
}

/// Euclidean distance. Dimensions must agree (checked in debug builds;
/// use [`try_dist`] for validated input).
#[inline]
pub fn dist(p: &[f64], q: &[f64]) -> f64 {
    sq_dist(p, q).sqrt()
}

/// Euclidean distance with dimension validation.
pub fn try_dist(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::Input(format!(
            "dimension mismatch: {} vs {}",
            p.len(),
            q.len()
        )));
    }
    Ok(dist(p, q))
}

/// Euclidean distance through an instrumented context: one counted
/// evaluation, two touched points.
#[inline]
pub fn dist_counted(p: &[f64], q: &[f64], counter: &EvalCounter) -> f64 {
    counter.record_dists(1);
    counter.record_touched(2);
    dist(p, q)
}

/// The k-th largest value (k = 1 is the maximum), in expected linear time.
pub fn kth_largest(values: &[f64], k: usize) -> Result<f64> {
    if k == 0 || k > values.len() {
        return Err(Error::Input(format!(
            "k = {k} out of range for {} values",
            values.len()
        )));
    }
    let mut scratch = values.to_vec();
    let (_, v, _) = scratch.select_nth_unstable_by(k - 1, |a, b| b.total_cmp(a));
    Ok(*v)
}

/// Rank order used for every "farthest m" selection: larger value first,
/// equal values broken by smaller index first.
#[inline]
pub(crate) fn rank_desc(a: &(f64, usize), b: &(f64, usize)) -> std::cmp::Ordering {
    b.0.total_cmp(&a.0).then_with(|| a.1.cmp(&b.1))
}

/// Partitions `pairs` so that the `m` highest-ranked (value, index) pairs
/// occupy `pairs[..m]` (in arbitrary order) and returns the (m+1)-th ranked
/// pair. Requires `m < pairs.len()`.
pub(crate) fn partition_farthest(pairs: &mut [(f64, usize)], m: usize) -> (f64, usize) {
    debug_assert!(m < pairs.len());
    let (_, boundary, _) = pairs.select_nth_unstable_by(m, rank_desc);
    *boundary
}

/// Index of the point of `ps` farthest from `c`; ties resolve to the
/// smallest index. Counts one distance evaluation per point.
pub fn farthest_index(ps: &PointSet, c: &[f64], counter: &EvalCounter) -> Result<usize> {
    if c.len() != ps.dim() {
        return Err(Error::Input(format!(
            "dimension mismatch: center {} vs set {}",
            c.len(),
            ps.dim()
        )));
    }
    let mut best = (0usize, f64::NEG_INFINITY);
    for (i, p) in ps.iter().enumerate() {
        let d2 = sq_dist(p, c);
        if d2 > best.1 {
            best = (i, d2);
        }
    }
    counter.record_dists(ps.n() as u64);
    counter.record_touched(ps.n() as u64);
    Ok(best.0)
}

/// `m` independent uniform index draws (with replacement).
pub fn sample_indices(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    (0..m).map(|_| rng.gen_range(0..n)).collect()
}

/// `m` draws with replacement from `ps`, as a new point set.
///
/// With-replacement matches the independence assumptions of the sampling
/// lemmas; callers that need the degenerate exact mode handle it themselves.
pub fn sample_uniform(ps: &PointSet, m: usize, rng: &mut ChaCha8Rng) -> Result<PointSet> {
    if m == 0 {
        return Err(Error::input("sample size must be at least 1"));
    }
    let d = ps.dim();
    let mut data = Vec::with_capacity(m * d);
    for _ in 0..m {
        let i = rng.gen_range(0..ps.n());
        data.extend_from_slice(ps.point(i));
    }
    Ok(PointSet { data, n: m, d })
}
