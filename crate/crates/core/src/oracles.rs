//! Reference solvers and brute-force anchors.
//!
//! Everything in this module is deterministic and independent of the
//! sampling-based solvers it is used to validate: a Frank-Wolfe solver with
//! away steps for near-exact MEB and polytope distance, an exact Welzl
//! recursion for d <= 3, and subset-enumeration brute force for the small
//! outlier instances used as acceptance anchors.

use crate::error::{Error, Result};
use crate::geometry::{dist, sq_dist, Point, PointSet, RngStream};
use crate::meb::Ball;

use rand::Rng;

const REFERENCE_MAX_ITERS: usize = 200_000;

/// Near-exact MEB by Frank-Wolfe on the dual with away steps.
///
/// Stops when the primal/dual radius bracket is relatively tighter than
/// `tol` (default 1e-9 when `None`). The returned ball uses the exact
/// farthest distance as its radius, so it always covers `ps`.
pub fn oracle_meb_reference(ps: &PointSet, tol: Option<f64>) -> Ball {
    let tol = tol.unwrap_or(1e-9);
    let n = ps.n();
    let d = ps.dim();
    if n == 1 {
        return Ball { center: ps.point(0).to_vec(), radius: 0.0 };
    }

    // Two-point initialization: farthest from point 0, then farthest from that.
    let i0 = farthest_from(ps, ps.point(0));
    let i1 = farthest_from(ps, ps.point(i0));
    let mut weights = vec![0.0f64; n];
    if i0 == i1 {
        // all points identical
        return Ball { center: ps.point(0).to_vec(), radius: 0.0 };
    }
    weights[i0] = 0.5;
    weights[i1] = 0.5;
    let mut center: Point = (0..d).map(|j| 0.5 * (ps.point(i0)[j] + ps.point(i1)[j])).collect();

    let mut g = vec![0.0f64; n];
    for _ in 0..REFERENCE_MAX_ITERS {
        // g_i = ||p_i - c||^2; phi = sum u_i g_i is the dual value.
        let mut far = (0usize, f64::NEG_INFINITY);
        let mut phi = 0.0;
        for i in 0..n {
            g[i] = sq_dist(ps.point(i), &center);
            if g[i] > far.1 {
                far = (i, g[i]);
            }
            if weights[i] > 0.0 {
                phi += weights[i] * g[i];
            }
        }
        let r_up = far.1.max(0.0).sqrt();
        let r_low = phi.max(0.0).sqrt();
        if r_up - r_low <= tol * r_up.max(f64::MIN_POSITIVE) {
            return Ball { center, radius: r_up };
        }

        // Away vertex: smallest g over the support.
        let mut away = (usize::MAX, f64::INFINITY);
        for i in 0..n {
            if weights[i] > 0.0 && g[i] < away.1 {
                away = (i, g[i]);
            }
        }

        let fw_gain = far.1 - phi;
        let away_gain = phi - away.1;
        if fw_gain >= away_gain {
            let denom = sq_dist(ps.point(far.0), &center);
            if denom <= 0.0 {
                return Ball { center, radius: r_up };
            }
            let step = (fw_gain / (2.0 * denom)).clamp(0.0, 1.0);
            for w in weights.iter_mut() {
                *w *= 1.0 - step;
            }
            weights[far.0] += step;
            let p = ps.point(far.0);
            for j in 0..d {
                center[j] += step * (p[j] - center[j]);
            }
        } else {
            let a = away.0;
            let denom = sq_dist(ps.point(a), &center);
            if denom <= 0.0 || weights[a] >= 1.0 {
                return Ball { center, radius: r_up };
            }
            let cap = weights[a] / (1.0 - weights[a]);
            let step = (away_gain / (2.0 * denom)).clamp(0.0, cap);
            for w in weights.iter_mut() {
                *w *= 1.0 + step;
            }
            weights[a] -= step;
            if weights[a] < 1e-17 {
                weights[a] = 0.0;
            }
            let p = ps.point(a);
            for j in 0..d {
                center[j] += step * (center[j] - p[j]);
            }
        }
    }
    let far = farthest_from(ps, &center);
    Ball { center: center.clone(), radius: dist(ps.point(far), &center) }
}

fn farthest_from(ps: &PointSet, c: &[f64]) -> usize {
    let mut best = (0usize, f64::NEG_INFINITY);
    for (i, p) in ps.iter().enumerate() {
        let d2 = sq_dist(p, c);
        if d2 > best.1 {
            best = (i, d2);
        }
    }
    best.0
}

/// Exact MEB for d <= 3 via the Welzl minidisk recursion.
pub fn oracle_meb_exact_lowdim(ps: &PointSet) -> Result<Ball> {
    if ps.dim() > 3 {
        return Err(Error::Input(format!(
            "exact low-dim solver supports d <= 3, got d = {}",
            ps.dim()
        )));
    }
    // Deterministic shuffle for expected-linear behaviour.
    let mut order: Vec<usize> = (0..ps.n()).collect();
    let mut rng = RngStream::new(0x5eed, 77).rng();
    for i in (1..order.len()).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    let mut support = Vec::with_capacity(ps.dim() + 1);
    Ok(welzl(ps, &order, order.len(), &mut support))
}

fn welzl(ps: &PointSet, order: &[usize], m: usize, support: &mut Vec<usize>) -> Ball {
    if m == 0 || support.len() == ps.dim() + 1 {
        return ball_from_support(ps, support);
    }
    let p = order[m - 1];
    let b = welzl(ps, order, m - 1, support);
    if ball_contains(&b, ps.point(p)) {
        return b;
    }
    support.push(p);
    let b = welzl(ps, order, m - 1, support);
    support.pop();
    b
}

fn ball_contains(b: &Ball, p: &[f64]) -> bool {
    if b.radius < 0.0 {
        return false;
    }
    sq_dist(&b.center, p) <= b.radius * b.radius * (1.0 + 1e-12) + 1e-300
}

/// Smallest ball with all support points on its boundary. A negative radius
/// marks the empty support (contains nothing).
fn ball_from_support(ps: &PointSet, support: &[usize]) -> Ball {
    let d = ps.dim();
    match support.len() {
        0 => Ball { center: vec![0.0; d], radius: -1.0 },
        1 => Ball { center: ps.point(support[0]).to_vec(), radius: 0.0 },
        _ => circumball(ps, support),
    }
}

/// Center a0 + sum(lambda_i v_i) with equal distances to all support points:
/// solves the Gram system (v_i . v_j) lambda = ||v_i||^2 / 2.
fn circumball(ps: &PointSet, support: &[usize]) -> Ball {
    let d = ps.dim();
    let a0 = ps.point(support[0]);
    let m = support.len() - 1;
    let vs: Vec<Vec<f64>> = (1..=m)
        .map(|i| {
            let ai = ps.point(support[i]);
            (0..d).map(|j| ai[j] - a0[j]).collect()
        })
        .collect();
    let mut mat = vec![vec![0.0f64; m + 1]; m];
    for i in 0..m {
        for j in 0..m {
            mat[i][j] = vs[i].iter().zip(&vs[j]).map(|(a, b)| a * b).sum();
        }
        mat[i][m] = 0.5 * sq_dist(&vs[i], &vec![0.0; d]);
    }
    match solve_gaussian(&mut mat) {
        Some(lambda) => {
            let mut center = a0.to_vec();
            for (i, l) in lambda.iter().enumerate() {
                for j in 0..d {
                    center[j] += l * vs[i][j];
                }
            }
            let radius = dist(&center, a0);
            Ball { center, radius }
        }
        // Affinely dependent support: drop the last point.
        None => ball_from_support(ps, &support[..support.len() - 1]),
    }
}

/// Gaussian elimination with partial pivoting on an augmented m x (m+1)
/// system. Returns None when near-singular.
fn solve_gaussian(mat: &mut [Vec<f64>]) -> Option<Vec<f64>> {
    let m = mat.len();
    let scale: f64 = mat
        .iter()
        .flat_map(|r| r[..m].iter())
        .fold(0.0f64, |acc, x| acc.max(x.abs()))
        .max(f64::MIN_POSITIVE);
    for col in 0..m {
        let pivot = (col..m).max_by(|&a, &b| mat[a][col].abs().total_cmp(&mat[b][col].abs()))?;
        if mat[pivot][col].abs() < 1e-12 * scale {
            return None;
        }
        mat.swap(col, pivot);
        for row in col + 1..m {
            let f = mat[row][col] / mat[col][col];
            for k in col..=m {
                mat[row][k] -= f * mat[col][k];
            }
        }
    }
    let mut x = vec![0.0; m];
    for row in (0..m).rev() {
        let mut acc = mat[row][m];
        for k in row + 1..m {
            acc -= mat[row][k] * x[k];
        }
        x[row] = acc / mat[row][row];
    }
    Some(x)
}

/// Exact MEB-with-outliers by subset enumeration (Definition of the
/// problem realized literally). Limited to n <= 15 and at most 3 outliers.
pub fn oracle_meb_outliers_bruteforce(ps: &PointSet, gamma: f64) -> Result<(f64, Vec<usize>)> {
    let n = ps.n();
    if n > 15 {
        return Err(Error::Input(format!("brute force limited to n <= 15, got {n}")));
    }
    let keep = ((1.0 - gamma) * n as f64).ceil() as usize;
    if keep == 0 {
        return Err(Error::input("no points kept"));
    }
    let drop = n - keep;
    if drop > 3 {
        return Err(Error::Input(format!("brute force limited to <= 3 outliers, got {drop}")));
    }
    let mut best: Option<(f64, Vec<usize>)> = None;
    for excluded in combinations(n, drop) {
        let kept: Vec<usize> = (0..n).filter(|i| !excluded.contains(i)).collect();
        let rows: Vec<Point> = kept.iter().map(|&i| ps.point(i).to_vec()).collect();
        let sub = PointSet::new(rows).expect("non-empty subset");
        let ball = oracle_meb_reference(&sub, Some(1e-10));
        if best.as_ref().map_or(true, |(r, _)| ball.radius < *r) {
            best = Some((ball.radius, kept));
        }
    }
    Ok(best.expect("at least one subset"))
}

/// All size-`k` index subsets of 0..n in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Exact k-center-with-outliers by enumerating exclusion subsets and
/// cluster assignments. Limited to n <= 10 and k <= 2.
pub fn oracle_kcenter_bruteforce(
    ps: &PointSet,
    k: usize,
    gamma: f64,
) -> Result<(f64, Vec<Point>)> {
    let n = ps.n();
    if n > 10 || k == 0 || k > 2 {
        return Err(Error::input("k-center brute force limited to n <= 10, k <= 2"));
    }
    let keep = ((1.0 - gamma) * n as f64).ceil() as usize;
    let drop = n - keep;
    if drop > 3 {
        return Err(Error::input("k-center brute force limited to <= 3 outliers"));
    }
    let mut best: Option<(f64, Vec<Point>)> = None;
    for excluded in combinations(n, drop) {
        let kept: Vec<usize> = (0..n).filter(|i| !excluded.contains(i)).collect();
        if k == 1 {
            let rows: Vec<Point> = kept.iter().map(|&i| ps.point(i).to_vec()).collect();
            let ball = oracle_meb_reference(&PointSet::new(rows)?, Some(1e-10));
            if best.as_ref().map_or(true, |(r, _)| ball.radius < *r) {
                best = Some((ball.radius, vec![ball.center]));
            }
            continue;
        }
        // Fix kept[0] in cluster 0; enumerate the remaining memberships.
        let m = kept.len();
        for mask in 0u32..(1 << (m - 1)) {
            let mut groups: [Vec<Point>; 2] = [Vec::new(), Vec::new()];
            groups[0].push(ps.point(kept[0]).to_vec());
            for (bit, &idx) in kept[1..].iter().enumerate() {
                let g = ((mask >> bit) & 1) as usize;
                groups[g].push(ps.point(idx).to_vec());
            }
            let mut radius = 0.0f64;
            let mut centers = Vec::new();
            for g in &groups {
                if g.is_empty() {
                    continue;
                }
                let ball = oracle_meb_reference(&PointSet::new(g.clone())?, Some(1e-10));
                radius = radius.max(ball.radius);
                centers.push(ball.center);
            }
            if best.as_ref().map_or(true, |(r, _)| radius < *r) {
                best = Some((radius, centers));
            }
        }
    }
    Ok(best.expect("at least one assignment"))
}

/// A certified two-sided bracket on the polytope distance from the origin
/// to conv(P).
#[derive(Debug, Clone)]
pub struct PolytopeBracket {
    /// Best Gilbert certificate seen: a valid lower bound on the distance
    /// (non-positive when the origin lies in the hull).
    pub lower: f64,
    /// Norm of the final iterate: a valid upper bound.
    pub upper: f64,
    /// The final iterate inside conv(P).
    pub witness: Point,
}

/// Near-exact polytope distance by Frank-Wolfe with away steps, run until
/// the certificate bracket is relatively tighter than 1e-9.
pub fn oracle_polytope_bracket(ps: &PointSet) -> PolytopeBracket {
    polytope_min_norm(ps, 1e-9, 500_000)
}

pub(crate) fn polytope_min_norm(ps: &PointSet, tol: f64, max_iters: usize) -> PolytopeBracket {
    let n = ps.n();
    let d = ps.dim();
    let norms: Vec<f64> = ps.iter().map(|p| sq_dist(p, &vec![0.0; d])).collect();
    let start = (0..n)
        .min_by(|&a, &b| norms[a].total_cmp(&norms[b]))
        .expect("non-empty set");
    let mut weights = vec![0.0f64; n];
    weights[start] = 1.0;
    let mut v: Point = ps.point(start).to_vec();
    let mut best_cert = f64::NEG_INFINITY;

    for _ in 0..max_iters {
        let vnorm = sq_dist(&v, &vec![0.0; d]).sqrt();
        if vnorm < 1e-150 {
            best_cert = best_cert.max(0.0);
            return PolytopeBracket { lower: best_cert.min(0.0), upper: vnorm, witness: v };
        }
        // Projections <p_i, v>/||v||; FW vertex minimizes, away maximizes.
        let mut fw = (0usize, f64::INFINITY);
        let mut away = (usize::MAX, f64::NEG_INFINITY);
        for i in 0..n {
            let proj: f64 = ps.point(i).iter().zip(&v).map(|(a, b)| a * b).sum();
            if proj < fw.1 {
                fw = (i, proj);
            }
            if weights[i] > 0.0 && proj > away.1 {
                away = (i, proj);
            }
        }
        let cert = fw.1 / vnorm;
        best_cert = best_cert.max(cert);
        if vnorm - best_cert <= tol * vnorm {
            return PolytopeBracket { lower: best_cert, upper: vnorm, witness: v };
        }

        // Optimal quadratic step toward the FW vertex and away from the
        // heaviest-projection support vertex; take the better of the two.
        let pf = ps.point(fw.0);
        let fw_num: f64 = v.iter().zip(pf).map(|(c, p)| c * (c - p)).sum();
        let fw_den = sq_dist(&v, pf);
        let fw_step = if fw_den > 0.0 { (fw_num / fw_den).clamp(0.0, 1.0) } else { 0.0 };
        let fw_impr = fw_step * (2.0 * fw_num - fw_step * fw_den).max(0.0);

        let (aw_step, aw_impr) = if away.0 != usize::MAX && weights[away.0] < 1.0 {
            let pa = ps.point(away.0);
            let num: f64 = v.iter().zip(pa).map(|(c, p)| c * (p - c)).sum();
            let den = sq_dist(&v, pa);
            if den > 0.0 && num > 0.0 {
                let cap = weights[away.0] / (1.0 - weights[away.0]);
                let step = (num / den).clamp(0.0, cap);
                (step, step * (2.0 * num - step * den).max(0.0))
            } else {
                (0.0, 0.0)
            }
        } else {
            (0.0, 0.0)
        };

        if fw_impr <= 0.0 && aw_impr <= 0.0 {
            return PolytopeBracket { lower: best_cert, upper: vnorm, witness: v };
        }
        if fw_impr >= aw_impr {
            for w in weights.iter_mut() {
                *w *= 1.0 - fw_step;
            }
            weights[fw.0] += fw_step;
            for j in 0..d {
                v[j] += fw_step * (pf[j] - v[j]);
            }
        } else {
            let a = away.0;
            for w in weights.iter_mut() {
                *w *= 1.0 + aw_step;
            }
            weights[a] -= aw_step;
            if weights[a] < 1e-17 {
                weights[a] = 0.0;
            }
            let pa = ps.point(a).to_vec();
            for j in 0..d {
                v[j] += aw_step * (v[j] - pa[j]);
            }
        }
    }
    let vnorm = sq_dist(&v, &vec![0.0; d]).sqrt();
    PolytopeBracket { lower: best_cert, upper: vnorm, witness: v }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::RngStream;
    use rand::Rng;

    fn random_set(n: usize, d: usize, seed: u64) -> PointSet {
        let mut rng = RngStream::from_seed(seed).rng();
        PointSet::new(
            (0..n)
                .map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn welzl_two_points() {
        let ps = PointSet::new(vec![vec![0.0, 0.0], vec![2.0, 0.0]]).unwrap();
        let b = oracle_meb_exact_lowdim(&ps).unwrap();
        assert!((b.radius - 1.0).abs() < 1e-12);
        assert!((b.center[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn welzl_equilateral_circumcircle() {
        let h = 3.0f64.sqrt() / 2.0;
        let ps = PointSet::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, h]]).unwrap();
        let b = oracle_meb_exact_lowdim(&ps).unwrap();
        let circumradius = 1.0 / 3.0f64.sqrt();
        assert!((b.radius - circumradius).abs() < 1e-12);
        assert!((b.center[0] - 0.5).abs() < 1e-12);
        assert!((b.center[1] - h / 3.0).abs() < 1e-12);
    }

    #[test]
    fn reference_agrees_with_welzl() {
        for seed in 0..8 {
            for d in [2usize, 3] {
                let ps = random_set(50, d, seed);
                let exact = oracle_meb_exact_lowdim(&ps).unwrap();
                let refb = oracle_meb_reference(&ps, None);
                assert!(
                    (exact.radius - refb.radius).abs() <= 1e-7 * exact.radius.max(1.0),
                    "d={d} seed={seed}: welzl {} vs reference {}",
                    exact.radius,
                    refb.radius
                );
                // Reference ball must actually cover.
                for p in ps.iter() {
                    assert!(dist(p, &refb.center) <= refb.radius * (1.0 + 1e-9) + 1e-12);
                }
            }
        }
    }

    #[test]
    fn reference_identical_points() {
        let ps = PointSet::new(vec![vec![2.0, 2.0]; 5]).unwrap();
        let b = oracle_meb_reference(&ps, None);
        assert_eq!(b.radius, 0.0);
    }

    #[test]
    fn bruteforce_excludes_extreme_outlier() {
        let mut rows = vec![vec![100.0, 0.0]];
        rows.extend((0..9).map(|i| vec![(i as f64) * 0.1, 0.0]));
        let ps = PointSet::new(rows).unwrap();
        let (radius, kept) = oracle_meb_outliers_bruteforce(&ps, 0.1).unwrap();
        assert!(!kept.contains(&0), "extreme point must be excluded");
        assert!((radius - 0.4).abs() < 1e-8);
    }

    #[test]
    fn bruteforce_gamma_zero_is_plain_reference() {
        let ps = random_set(12, 3, 4);
        let (radius, kept) = oracle_meb_outliers_bruteforce(&ps, 0.0).unwrap();
        assert_eq!(kept.len(), 12);
        let b = oracle_meb_reference(&ps, None);
        assert!((radius - b.radius).abs() < 1e-8 * b.radius.max(1.0));
    }

    #[test]
    fn polytope_bracket_two_points() {
        let ps = PointSet::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let bk = oracle_polytope_bracket(&ps);
        let expect = std::f64::consts::SQRT_2 / 2.0;
        assert!((bk.upper - expect).abs() < 1e-9);
        assert!(bk.upper - bk.lower <= 1e-8 * bk.upper);
    }

    #[test]
    fn polytope_bracket_tight_on_random_separable() {
        for seed in 0..10 {
            let mut rng = RngStream::from_seed(900 + seed).rng();
            let d = 4;
            let rows: Vec<Vec<f64>> = (0..40)
                .map(|_| {
                    let mut p: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    p[0] += 2.0; // strictly separated from the origin
                    p
                })
                .collect();
            let ps = PointSet::new(rows).unwrap();
            let bk = oracle_polytope_bracket(&ps);
            assert!(bk.lower > 0.0);
            assert!(bk.upper - bk.lower <= 1e-8 * bk.upper, "width {}", bk.upper - bk.lower);
        }
    }

    #[test]
    fn polytope_origin_inside_hull() {
        let ps = PointSet::new(vec![
            vec![1.0, 1.0],
            vec![-1.0, 1.0],
            vec![1.0, -1.0],
            vec![-1.0, -1.0],
        ])
        .unwrap();
        let bk = oracle_polytope_bracket(&ps);
        assert!(bk.lower <= 0.0, "origin in hull must yield non-positive certificate");
    }

    #[test]
    fn kcenter_bruteforce_two_obvious_clusters() {
        let rows = vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.5, 0.5],
            vec![10.0, 0.0],
            vec![11.0, 0.0],
            vec![10.5, 0.5],
        ];
        let ps = PointSet::new(rows).unwrap();
        let (radius, centers) = oracle_kcenter_bruteforce(&ps, 2, 0.0).unwrap();
        assert_eq!(centers.len(), 2);
        // Each visible cluster is an isoceles triangle with circumradius < 0.7.
        assert!(radius < 0.7, "radius {radius}");
    }
}
