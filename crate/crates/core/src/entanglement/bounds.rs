//! Boundaries Δ_b^(k−1) of the {Δ, y_c} witness.
//!
//! At y_c = 0 the boundary for k−1 = s is the smallest Δ reached by a
//! balanced s-site W state in the N_m register. Coefficients are restricted
//! to ±1 (enlarging to {±1, ±i} gives the same minima for N_m ≤ 8). For
//! N_m ≤ 16 every subset and sign pattern is searched, with site 0 pinned
//! in the subset at sign + (the projector set is invariant under dyadic
//! translations and a global sign). Larger registers use contiguous windows
//! at every offset with equal signs.
//!
//! For y_c > 0 the test family is c disjoint s-site clusters, each in
//! cos a|G⟩ + sin a (cos b |W_s⟩ + sin b |D²_s⟩). Its single-excitation part
//! is a balanced W over c·s sites, so Δ = Δ_b(c·s; y_c = 0), while
//!   p₀ = q₀^c,  p₁ = c q₁ q₀^(c−1),  q₀ = cos²a,  q₁ = sin²a cos²b.
//! The boundary is the lower convex hull of these points in the (y_c, Δ)
//! plane, held constant after its minimum.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use super::{EntanglementError, WProjectorBasis};

/// Grid points per angle for the y_c > 0 family.
pub const HULL_GRID: usize = 200;

/// Registers up to this size get the exhaustive search.
const EXHAUSTIVE_MAX: usize = 16;

type HullKey = (usize, usize, usize, usize);

fn zero_memo() -> &'static Mutex<HashMap<usize, Arc<Vec<f64>>>> {
    static M: OnceLock<Mutex<HashMap<usize, Arc<Vec<f64>>>>> = OnceLock::new();
    M.get_or_init(Default::default)
}

fn hull_memo() -> &'static Mutex<HashMap<HullKey, Arc<Vec<(f64, f64)>>>> {
    static M: OnceLock<Mutex<HashMap<HullKey, Arc<Vec<(f64, f64)>>>>> = OnceLock::new();
    M.get_or_init(Default::default)
}

fn fwht(a: &mut [f64]) {
    let n = a.len();
    let mut h = 1;
    while h < n {
        for i in (0..n).step_by(2 * h) {
            for j in i..i + h {
                let (x, y) = (a[j], a[j + h]);
                a[j] = x + y;
                a[j + h] = x - y;
            }
        }
        h *= 2;
    }
}

/// Δ of the normalized single-excitation state with real amplitudes `a`.
pub(crate) fn delta_of_amplitudes(a: &[f64]) -> f64 {
    let norm2: f64 = a.iter().map(|x| x * x).sum();
    let mut h = a.to_vec();
    fwht(&mut h);
    let scale = 1.0 / (a.len() as f64 * norm2);
    1.0 - h.iter().map(|x| (x * x * scale).powi(2)).sum::<f64>()
}

fn exhaustive(n_m: usize) -> Vec<f64> {
    let mut best = vec![f64::INFINITY; n_m];
    let mut a = vec![0.0; n_m];
    let mut sites = Vec::with_capacity(n_m);
    for rest in 0u64..(1u64 << (n_m - 1)) {
        let subset = 1 | (rest << 1);
        sites.clear();
        sites.extend((0..n_m).filter(|&i| subset >> i & 1 == 1));
        let s = sites.len();
        for signs in 0u64..(1u64 << (s - 1)) {
            a.iter_mut().for_each(|x| *x = 0.0);
            a[0] = 1.0;
            for (k, &site) in sites.iter().enumerate().skip(1) {
                a[site] = if signs >> (k - 1) & 1 == 1 { -1.0 } else { 1.0 };
            }
            let d = delta_of_amplitudes(&a);
            if d < best[s - 1] {
                best[s - 1] = d;
            }
        }
    }
    best
}

fn windows(n_m: usize) -> Vec<f64> {
    let mut best = vec![f64::INFINITY; n_m];
    let mut a = vec![0.0; n_m];
    for len in 1..=n_m {
        for off in 0..=(n_m - len) {
            a.iter_mut().enumerate().for_each(|(i, x)| *x = if (off..off + len).contains(&i) { 1.0 } else { 0.0 });
            best[len - 1] = best[len - 1].min(delta_of_amplitudes(&a));
        }
    }
    best
}

/// Δ_b^(s) at y_c = 0 for s = 1..=n_m (entry s−1).
pub fn zero_bounds(n_m: usize) -> Arc<Vec<f64>> {
    assert!(n_m.is_power_of_two() && n_m >= 2, "register size must be a power of two");
    if let Some(v) = zero_memo().lock().expect("memo lock").get(&n_m) {
        return v.clone();
    }
    let v = Arc::new(if n_m <= EXHAUSTIVE_MAX { exhaustive(n_m) } else { windows(n_m) });
    zero_memo().lock().expect("memo lock").entry(n_m).or_insert(v).clone()
}

fn prefactor(n_a: usize) -> f64 {
    2.0 * n_a as f64 / (n_a as f64 - 1.0)
}

/// Smallest y_c of the c-cluster family on the angle grid.
fn min_cluster_y(n_a: usize, s: usize, c: usize, grid: usize) -> f64 {
    let half_pi = std::f64::consts::FRAC_PI_2;
    let n_b = if s >= 2 { grid } else { 1 };
    let cf = c as f64;
    let mut best = f64::INFINITY;
    for i in 0..grid {
        let a = (i as f64 + 0.5) * half_pi / grid as f64;
        let q0 = a.cos().powi(2);
        for j in 0..n_b {
            let b = if n_b > 1 { j as f64 * half_pi / (n_b - 1) as f64 } else { 0.0 };
            let q1 = a.sin().powi(2) * b.cos().powi(2);
            let p0 = q0.powi(c as i32);
            let p1 = cf * q1 * q0.powi(c as i32 - 1);
            let p2 = (1.0 - p0 - p1).max(0.0);
            let y = prefactor(n_a) * p2 * p0 / (p1 * p1);
            if y.is_finite() && y < best {
                best = y;
            }
        }
    }
    best
}

fn hull(n_m: usize, n_a: usize, s: usize, grid: usize) -> Arc<Vec<(f64, f64)>> {
    let key = (n_m, n_a, s, grid);
    if let Some(v) = hull_memo().lock().expect("memo lock").get(&key) {
        return v.clone();
    }
    let z = zero_bounds(n_m);
    let mut pts = vec![(0.0, z[s - 1])];
    for c in 2..=(n_m / s) {
        let y = min_cluster_y(n_a, s, c, grid);
        if y.is_finite() {
            pts.push((y, z[c * s - 1]));
        }
    }
    pts.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.total_cmp(&q.1)));
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for p in pts {
        while lower.len() >= 2 {
            let (o, a) = (lower[lower.len() - 2], lower[lower.len() - 1]);
            let cross = (a.0 - o.0) * (p.1 - o.1) - (a.1 - o.1) * (p.0 - o.0);
            if cross <= 0.0 {
                lower.pop();
            } else {
                break;
            }
        }
        lower.push(p);
    }
    let imin = lower
        .iter()
        .enumerate()
        .min_by(|x, y| x.1 .1.total_cmp(&y.1 .1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    lower.truncate(imin + 1);
    let v = Arc::new(lower);
    hull_memo().lock().expect("memo lock").entry(key).or_insert(v).clone()
}

fn eval_hull(h: &[(f64, f64)], y: f64) -> f64 {
    if y <= h[0].0 {
        return h[0].1;
    }
    for w in h.windows(2) {
        let ((y0, d0), (y1, d1)) = (w[0], w[1]);
        if y <= y1 {
            return d0 + (d1 - d0) * (y - y0) / (y1 - y0);
        }
    }
    h[h.len() - 1].1
}

/// Δ_b^(k−1) for a register of `n_m` sites probing `n_a` of them.
pub fn bound_delta_for(k_minus_1: usize, n_m: usize, n_a: usize, y_c: f64) -> Result<f64, EntanglementError> {
    if k_minus_1 == 0 || k_minus_1 > n_m {
        return Err(EntanglementError::BadTier { k: k_minus_1, n_m });
    }
    if !(y_c > 0.0) || n_a < 2 {
        return Ok(zero_bounds(n_m)[k_minus_1 - 1]);
    }
    Ok(eval_hull(&hull(n_m, n_a, k_minus_1, HULL_GRID), y_c))
}

/// Δ_b^(k−1) with the whole register probed.
pub fn bound_delta(k_minus_1: usize, basis: &WProjectorBasis, y_c: f64) -> Result<f64, EntanglementError> {
    bound_delta_for(k_minus_1, basis.n_m, basis.n_m, y_c)
}

/// Largest difference between the boundary at the default grid and at twice
/// that density, sampled on both hulls' vertices.
pub fn hull_convergence(k_minus_1: usize, n_m: usize, n_a: usize) -> f64 {
    let a = hull(n_m, n_a, k_minus_1, HULL_GRID);
    let b = hull(n_m, n_a, k_minus_1, 2 * HULL_GRID);
    a.iter()
        .chain(b.iter())
        .map(|&(y, _)| (eval_hull(&a, y) - eval_hull(&b, y)).abs())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryRow {
    pub k_minus_1: usize,
    pub bound: f64,
    /// Δ_b^(k−1) < Δ_b^(k): the tier order is inverted here.
    pub ambiguous: bool,
}

/// All tiers at one y_c.
pub fn boundary_table(n_m: usize, n_a: usize, y_c: f64) -> Result<Vec<BoundaryRow>, EntanglementError> {
    let vals: Vec<f64> = (1..=n_m).map(|k| bound_delta_for(k, n_m, n_a, y_c)).collect::<Result<_, _>>()?;
    Ok(vals
        .iter()
        .enumerate()
        .map(|(i, &b)| BoundaryRow { k_minus_1: i + 1, bound: b, ambiguous: vals.get(i + 1).is_some_and(|&next| b < next) })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn two_site_register() {
        let z = zero_bounds(2);
        assert_abs_diff_eq!(z[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(z[1], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn four_site_register() {
        let z = zero_bounds(4);
        let expect = [0.75, 0.5, 5.0 / 12.0, 0.0];
        for (g, e) in z.iter().zip(expect) {
            assert_abs_diff_eq!(*g, e, epsilon = 1e-14);
        }
    }

    #[test]
    fn eight_site_register_is_not_monotone() {
        let z = zero_bounds(8);
        assert_abs_diff_eq!(z[7], 0.0, epsilon = 1e-14);
        assert!(z[3] < z[4], "{z:?}");
        let t = boundary_table(8, 8, 0.0).unwrap();
        assert!(t[3].ambiguous);
        assert!(!t[6].ambiguous);
    }

    #[test]
    fn quaternary_phases_do_not_lower_the_bound() {
        // brute force over {±1, ±i} for N_m = 4
        let n = 4;
        let mut best = [f64::INFINITY; 4];
        for subset in 1u32..16 {
            let sites: Vec<usize> = (0..n).filter(|&i| subset >> i & 1 == 1).collect();
            let s = sites.len();
            for code in 0..4u32.pow(s as u32) {
                let mut a = vec![crate::C64::new(0.0, 0.0); n];
                let mut c = code;
                for &site in &sites {
                    a[site] = crate::C64::i().powu(c % 4);
                    c /= 4;
                }
                let basis = super::super::build_w_basis(2).unwrap();
                let probs: Vec<f64> = basis
                    .projectors
                    .iter()
                    .map(|v| v.iter().zip(&a).map(|(x, y)| y * *x).sum::<crate::C64>().norm_sqr() / s as f64)
                    .collect();
                let d = 1.0 - probs.iter().map(|p| p * p).sum::<f64>();
                best[s - 1] = best[s - 1].min(d);
            }
        }
        for (g, e) in zero_bounds(4).iter().zip(best) {
            assert_abs_diff_eq!(*g, e, epsilon = 1e-12);
        }
    }

    #[test]
    fn large_register_values() {
        let z = zero_bounds(128);
        assert_abs_diff_eq!(z[98], 0.388566, epsilon = 1e-6);
        assert_abs_diff_eq!(z[99], 0.37835, epsilon = 1e-5);
        assert_abs_diff_eq!(z[127], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn tier_range_checked() {
        assert!(bound_delta_for(0, 4, 4, 0.0).is_err());
        assert!(bound_delta_for(5, 4, 4, 0.0).is_err());
    }

    #[test]
    fn boundary_is_non_increasing_in_y() {
        for s in 1..=4 {
            let mut prev = f64::INFINITY;
            for k in 0..200 {
                let y = k as f64 * 0.02;
                let b = bound_delta_for(s, 4, 4, y).unwrap();
                assert!(b <= prev + 1e-15);
                prev = b;
            }
            assert_abs_diff_eq!(bound_delta_for(s, 4, 4, 0.0).unwrap(), zero_bounds(4)[s - 1], epsilon = 1e-15);
        }
    }

    #[test]
    fn hull_grid_is_converged() {
        for s in 1..=3 {
            assert!(hull_convergence(s, 4, 4) < 1e-3, "s={s}");
        }
    }
}
