//! Full Rydberg Hamiltonian and the perturbative effective model.
//!
//! Full model (rotating frame, 2^N dimensional):
//!
//!   H = Σ_i (δ n_i + Ω σx_i) − Σ_{i<j} Δ_ij n_i n_j
//!
//! Effective model, valid for Δ_nn ≫ Ω and δ ≈ Δ_nn/2: single excitations
//! hop with J_ij = Ω²/δ − Ω²/(δ − Δ_ij) and feel the light shift
//! Δ̄_i = Ω²/δ − Σ_{j≠i} Ω²/(δ − Δ_ij); the ground state is resonantly
//! coupled to nearest-neighbour pairs with amplitude 2Ω²/Δ_nn (H₂).
//!
//! In the single-excitation block the light shift enters the diagonal with a
//! positive sign, which makes the block equal to the hopping matrix
//! J·[[−1,1,−1,0],[1,0,1,−1],[−1,1,0,1],[0,−1,1,−1]] at N = 4, ξ⁶ = 3.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::lattice::{LatticeError, LatticeSpec, PairShiftTable};
use crate::states::{Basis, MAX_DENSE_SITES};
use crate::{CMatrix, C64};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HamiltonianError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("Rabi frequency must be positive and finite, got {0}")]
    BadOmega(f64),
    #[error("detuning must be non-zero and finite, got {0}")]
    BadDetuning(f64),
    #[error("decay rate must be non-negative and finite, got {0}")]
    BadRate(f64),
    #[error("reservoir site {index} out of range for {n_sites} sites")]
    ReservoirOutOfRange { index: usize, n_sites: usize },
    #[error("{0} sites exceed the dense limit of {MAX_DENSE_SITES}")]
    TooLarge(usize),
    #[error("pair ({i}, {j}) sits on the perturbative pole: |δ − Δ_ij| = {gap:e}")]
    Pole { i: usize, j: usize, gap: f64 },
    #[error("site pair ({i}, {j}) is invalid for {n_sites} sites")]
    BadPair { i: usize, j: usize, n_sites: usize },
}

/// Laser and decay parameters. Rates are in units of Γ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriveConfig {
    pub omega: f64,
    /// Detuning δ; `None` means Δ_nn/2.
    pub delta: Option<f64>,
    /// Bare Rydberg decay Γ_r.
    pub gamma_r: f64,
    /// Decay of dressed reservoir sites (Γ, 1 in internal units).
    pub gamma_reservoir: f64,
    /// Sites with enhanced decay (the set B), 0-based.
    pub reservoir_sites: Vec<usize>,
}

impl DriveConfig {
    /// Drive with Γ = 1, reservoir on the two chain ends.
    pub fn new(omega: f64, gamma_r: f64, n_sites: usize) -> Self {
        Self {
            omega,
            delta: None,
            gamma_r,
            gamma_reservoir: 1.0,
            reservoir_sites: vec![0, n_sites - 1],
        }
    }

    pub fn validate(&self, n_sites: usize) -> Result<(), HamiltonianError> {
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return Err(HamiltonianError::BadOmega(self.omega));
        }
        if let Some(d) = self.delta {
            if d == 0.0 || !d.is_finite() {
                return Err(HamiltonianError::BadDetuning(d));
            }
        }
        for r in [self.gamma_r, self.gamma_reservoir] {
            if !(r >= 0.0 && r.is_finite()) {
                return Err(HamiltonianError::BadRate(r));
            }
        }
        for &s in &self.reservoir_sites {
            if s >= n_sites {
                return Err(HamiltonianError::ReservoirOutOfRange { index: s, n_sites });
            }
        }
        Ok(())
    }

    /// Power-broadened linewidth w_d = sqrt(Γ_r²/4 + 2Ω²).
    pub fn linewidth(&self) -> f64 {
        (self.gamma_r * self.gamma_r / 4.0 + 2.0 * self.omega * self.omega).sqrt()
    }

    pub fn resolved_delta(&self, spec: &LatticeSpec) -> f64 {
        self.delta.unwrap_or_else(|| spec.nearest_shift() / 2.0)
    }

    /// Per-site decay Γ_i: Γ on reservoir sites, Γ_r elsewhere.
    pub fn site_rates(&self, n_sites: usize) -> Vec<f64> {
        (0..n_sites)
            .map(|i| if self.reservoir_sites.contains(&i) { self.gamma_reservoir } else { self.gamma_r })
            .collect()
    }
}

/// Lattice plus drive, parameterized as in the dynamics figures: lengths in
/// units of d_B so that C_p equals the linewidth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysicalSystem {
    pub lattice: LatticeSpec,
    pub drive: DriveConfig,
}

impl PhysicalSystem {
    /// `gamma_ratio` is Γ/Γ_r; Γ = 1.
    pub fn new(n_sites: usize, xi: f64, a0: f64, omega: f64, gamma_ratio: f64) -> Result<Self, HamiltonianError> {
        let drive = DriveConfig::new(omega, 1.0 / gamma_ratio, n_sites.max(1));
        Self::with_drive(n_sites, xi, a0, 6, drive)
    }

    pub fn with_drive(n_sites: usize, xi: f64, a0: f64, p: u32, drive: DriveConfig) -> Result<Self, HamiltonianError> {
        let lattice = LatticeSpec::in_blockade_units(n_sites, a0, xi, p, drive.linewidth())?;
        drive.validate(n_sites)?;
        Ok(Self { lattice, drive })
    }

    pub fn n_sites(&self) -> usize {
        self.lattice.n_sites
    }

    pub fn delta(&self) -> f64 {
        self.drive.resolved_delta(&self.lattice)
    }
}

/// Range of the hopping kept in the effective model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Truncation {
    Full,
    /// Drop |i−j| > 2: J_ij = 0 and each such term of the light shift takes
    /// its far-field value Ω²/δ.
    NextNearest,
}

/// Effective single-excitation model with the H₂ pair pump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectiveModel {
    pub n_sites: usize,
    pub j: Vec<Vec<f64>>,
    pub delta_ls: Vec<f64>,
    pub h2_amp: f64,
    pub truncation: Truncation,
    pub omega: f64,
    pub delta: f64,
    pub nearest_shift: f64,
}

impl EffectiveModel {
    /// Overall scale J = 4Ω²/Δ_nn.
    pub fn j_scale(&self) -> f64 {
        4.0 * self.omega * self.omega / self.nearest_shift
    }

    pub fn j_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n_sites, self.n_sites, |a, b| self.j[a][b])
    }
}

fn check_pole(delta: f64, shift: f64, w_d: f64, i: usize, j: usize) -> Result<(), HamiltonianError> {
    let gap = (delta - shift).abs();
    if gap < 1e-9 * w_d {
        return Err(HamiltonianError::Pole { i, j, gap });
    }
    Ok(())
}

fn check_delta(delta: f64) -> Result<(), HamiltonianError> {
    if delta == 0.0 || !delta.is_finite() {
        return Err(HamiltonianError::BadDetuning(delta));
    }
    Ok(())
}

/// J_ij = Ω²/δ − Ω²/(δ − Δ_ij).
pub fn effective_j(spec: &LatticeSpec, drive: &DriveConfig, i: usize, j: usize) -> Result<f64, HamiltonianError> {
    let n = spec.n_sites;
    if i == j || i >= n || j >= n {
        return Err(HamiltonianError::BadPair { i, j, n_sites: n });
    }
    let table = PairShiftTable::new(spec)?;
    let delta = drive.resolved_delta(spec);
    check_delta(delta)?;
    j_from_shift(drive.omega, delta, table.get(i, j), drive.linewidth(), i, j)
}

fn j_from_shift(omega: f64, delta: f64, shift: f64, w_d: f64, i: usize, j: usize) -> Result<f64, HamiltonianError> {
    check_pole(delta, shift, w_d, i, j)?;
    let o2 = omega * omega;
    Ok(o2 / delta - o2 / (delta - shift))
}

/// Hopping in the f-form (J/2)(1 − f_ij), f_ij = [1 − 2Δ_ij/Δ_nn]⁻¹. Equal to
/// [`effective_j`] when δ = Δ_nn/2.
pub fn effective_j_f_form(spec: &LatticeSpec, drive: &DriveConfig, i: usize, j: usize) -> Result<f64, HamiltonianError> {
    let n = spec.n_sites;
    if i == j || i >= n || j >= n {
        return Err(HamiltonianError::BadPair { i, j, n_sites: n });
    }
    let table = PairShiftTable::new(spec)?;
    let nn = spec.nearest_shift();
    check_pole(nn / 2.0, table.get(i, j), drive.linewidth(), i, j)?;
    let f = 1.0 / (1.0 - 2.0 * table.get(i, j) / nn);
    Ok(2.0 * drive.omega * drive.omega / nn * (1.0 - f))
}

/// Δ̄_i = Ω²/δ − Σ_{j≠i} Ω²/(δ − Δ_ij), no truncation.
pub fn effective_light_shift(spec: &LatticeSpec, drive: &DriveConfig, i: usize) -> Result<f64, HamiltonianError> {
    let m = build_effective_model(spec, drive, Truncation::Full)?;
    m.delta_ls
        .get(i)
        .copied()
        .ok_or(HamiltonianError::BadPair { i, j: i, n_sites: spec.n_sites })
}

/// Closed-form light shift at δ = Δ_nn/2 under next-nearest truncation,
/// with the chain ends handled separately. `i` is 0-based.
pub fn piecewise_light_shift(n_sites: usize, xi: f64, p: u32, j_scale: f64, i: usize) -> f64 {
    let n = n_sites as f64;
    let r = 2.0 / (2.0 - xi.powi(p as i32));
    let edge_dist = i.min(n_sites - 1 - i);
    let bracket = match edge_dist {
        0 => 4.0 + r - n,
        1 => 6.0 + r - n,
        _ => 6.0 + 2.0 * r - n,
    };
    0.5 * j_scale * bracket
}

pub fn build_effective_model(spec: &LatticeSpec, drive: &DriveConfig, truncation: Truncation) -> Result<EffectiveModel, HamiltonianError> {
    spec.validate()?;
    drive.validate(spec.n_sites)?;
    let n = spec.n_sites;
    let table = PairShiftTable::new(spec)?;
    let delta = drive.resolved_delta(spec);
    check_delta(delta)?;
    let w_d = drive.linewidth();
    let o2 = drive.omega * drive.omega;
    let mut j = vec![vec![0.0; n]; n];
    let mut delta_ls = vec![o2 / delta; n];
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            if truncation == Truncation::NextNearest && a.abs_diff(b) > 2 {
                // far-field limit of the pair term
                delta_ls[a] -= o2 / delta;
                continue;
            }
            let shift = table.get(a, b);
            check_pole(delta, shift, w_d, a, b)?;
            j[a][b] = o2 / delta - o2 / (delta - shift);
            delta_ls[a] -= o2 / (delta - shift);
        }
    }
    let nearest_shift = spec.nearest_shift();
    Ok(EffectiveModel {
        n_sites: n,
        j,
        delta_ls,
        h2_amp: 2.0 * o2 / nearest_shift,
        truncation,
        omega: drive.omega,
        delta,
        nearest_shift,
    })
}

/// H = Σ_i (δ n_i + Ω σx_i) − Σ_{i<j} Δ_ij n_i n_j on the full 2^N space.
pub fn build_full_hamiltonian(spec: &LatticeSpec, drive: &DriveConfig) -> Result<CMatrix, HamiltonianError> {
    spec.validate()?;
    drive.validate(spec.n_sites)?;
    let n = spec.n_sites;
    if n > MAX_DENSE_SITES {
        return Err(HamiltonianError::TooLarge(n));
    }
    let table = PairShiftTable::new(spec)?;
    let delta = drive.resolved_delta(spec);
    let dim = 1usize << n;
    let mut h = CMatrix::zeros(dim, dim);
    for m in 0..dim {
        let mut e = 0.0;
        for i in 0..n {
            if m >> i & 1 == 1 {
                e += delta;
                for j in (i + 1)..n {
                    if m >> j & 1 == 1 {
                        e -= table.get(i, j);
                    }
                }
            }
            h[(m ^ (1 << i), m)] += C64::new(drive.omega, 0.0);
        }
        h[(m, m)] += C64::new(e, 0.0);
    }
    Ok(h)
}

/// Effective Hamiltonian on [`Basis::effective`]: H_xy in the single
/// excitation block plus the H₂ coupling of |G⟩ to nearest-neighbour pairs.
pub fn build_effective_hamiltonian(model: &EffectiveModel) -> CMatrix {
    let basis = Basis::effective(model.n_sites);
    let mut h = build_h2_operator(model, &basis);
    let n = model.n_sites;
    for a in 0..n {
        let ia = basis.index_of(1 << a).expect("single excitation in basis");
        h[(ia, ia)] += C64::new(model.delta_ls[a], 0.0);
        for b in 0..n {
            if a != b {
                let ib = basis.index_of(1 << b).expect("single excitation in basis");
                h[(ia, ib)] += C64::new(model.j[a][b], 0.0);
            }
        }
    }
    h
}

/// H₂ = Σ_i (2Ω²/Δ_nn)(σ₊^i σ₊^{i+1} + h.c.) restricted to `basis`.
pub fn build_h2_operator(model: &EffectiveModel, basis: &Basis) -> CMatrix {
    let d = basis.dim();
    let mut h = CMatrix::zeros(d, d);
    let amp = C64::new(model.h2_amp, 0.0);
    for k in 0..d {
        let m = basis.mask(k);
        for i in 0..model.n_sites.saturating_sub(1) {
            let pair = (1u64 << i) | (1u64 << (i + 1));
            if m & pair == 0 {
                if let Some(t) = basis.index_of(m | pair) {
                    h[(t, k)] += amp;
                    h[(k, t)] += amp;
                }
            }
        }
    }
    h
}

/// Energies of packed Rydberg configurations and the pair-pump anharmonicity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RydbergSpectrum {
    /// V_n = Σ_{i<j<n} Δ_ij for n = 0..=N (first n sites excited).
    pub v: Vec<f64>,
    /// δV_{n+2,n} = Δ(0,n) + Δ(0,n+1) for n = 0..N−2, with Δ(0,0) = 0.
    pub anharmonicity: Vec<f64>,
    /// δ_n^(2) = (V_{n+2} − V_n)/2.
    pub two_photon_detuning: Vec<f64>,
    /// w_d^(2) = sqrt(Γ_r² + 2|Ω₂|²) with Ω₂ = 2Ω²/δ_n^(2); empty without a drive.
    pub two_photon_linewidth: Vec<f64>,
    /// δV_{n+2,n} > w_d^(2) per n; empty without a drive.
    pub blockaded: Vec<bool>,
}

pub fn rydberg_spectrum(spec: &LatticeSpec, drive: Option<&DriveConfig>) -> Result<RydbergSpectrum, HamiltonianError> {
    let table = PairShiftTable::new(spec)?;
    let n = spec.n_sites;
    let mut v = vec![0.0; n + 1];
    for k in 2..=n {
        v[k] = v[k - 1] + (0..k - 1).map(|i| table.get(i, k - 1)).sum::<f64>();
    }
    let anharmonicity: Vec<f64> = (0..n - 1)
        .map(|k| if k == 0 { 0.0 } else { table.get(0, k) } + table.get(0, k + 1))
        .collect();
    let two_photon_detuning: Vec<f64> = (0..n - 1).map(|k| (v[k + 2] - v[k]) / 2.0).collect();
    let (two_photon_linewidth, blockaded) = match drive {
        Some(d) => {
            let wd2: Vec<f64> = two_photon_detuning
                .iter()
                .map(|dn| {
                    let o2 = 2.0 * d.omega * d.omega / dn;
                    (d.gamma_r * d.gamma_r + 2.0 * o2 * o2).sqrt()
                })
                .collect();
            let ok = anharmonicity.iter().zip(&wd2).map(|(a, w)| a > w).collect();
            (wd2, ok)
        }
        None => (Vec::new(), Vec::new()),
    };
    Ok(RydbergSpectrum { v, anharmonicity, two_photon_detuning, two_photon_linewidth, blockaded })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermiticity_defect;
    use approx::assert_relative_eq;

    fn xi_dark() -> f64 {
        3f64.powf(1.0 / 6.0)
    }

    fn spec(n: usize, xi: f64) -> LatticeSpec {
        LatticeSpec::new(n, 0.3, xi, 6, 1.7).unwrap()
    }

    fn drive(n: usize) -> DriveConfig {
        DriveConfig::new(0.9, 1e-4, n)
    }

    #[test]
    fn single_pair_full_hamiltonian() {
        let s = LatticeSpec::new(2, 1.0, 1.2, 6, 5.0).unwrap();
        let mut d = drive(2);
        d.delta = Some(0.7);
        let h = build_full_hamiltonian(&s, &d).unwrap();
        assert_eq!(h[(0, 1)].re, 0.9);
        assert_eq!(h[(1, 3)].re, 0.9);
        assert_eq!(h[(0, 3)].re, 0.0);
        assert_relative_eq!(h[(3, 3)].re, 1.4 - 5.0, epsilon = 1e-14);
        assert_relative_eq!(h[(1, 1)].re, 0.7);
        assert_eq!(hermiticity_defect(&h), 0.0);
    }

    #[test]
    fn triple_energy_uses_next_nearest_shift() {
        let s = spec(3, xi_dark());
        let d = drive(3);
        let h = build_full_hamiltonian(&s, &d).unwrap();
        let delta = d.resolved_delta(&s);
        let nn = s.nearest_shift();
        assert_relative_eq!(h[(0b101, 0b101)].re, 2.0 * delta - nn / 3.0, max_relative = 1e-12);
    }

    #[test]
    fn hopping_values() {
        let s = spec(5, xi_dark());
        let d = drive(5);
        let j = 4.0 * d.omega * d.omega / s.nearest_shift();
        assert_relative_eq!(effective_j(&s, &d, 1, 2).unwrap(), j, max_relative = 1e-12);
        assert_relative_eq!(effective_j(&s, &d, 1, 3).unwrap(), -j, max_relative = 1e-12);
        assert!(effective_j(&s, &d, 1, 1).is_err());
    }

    #[test]
    fn far_pair_hopping_vanishes() {
        let s = spec(40, 1.5);
        let d = drive(40);
        let near = effective_j(&s, &d, 0, 1).unwrap();
        let mid = effective_j(&s, &d, 0, 20).unwrap();
        let far = effective_j(&s, &d, 0, 39).unwrap();
        assert!(far.abs() < 1e-6 * near.abs());
        assert!(far.abs() < mid.abs());
    }

    #[test]
    fn pole_is_reported() {
        let s = spec(3, 1.5);
        let mut d = drive(3);
        d.delta = Some(s.nearest_shift());
        assert!(matches!(effective_j(&s, &d, 0, 1), Err(HamiltonianError::Pole { .. })));
    }

    #[test]
    fn methods_matrix_n4() {
        let s = spec(4, xi_dark());
        let d = drive(4);
        let m = build_effective_model(&s, &d, Truncation::NextNearest).unwrap();
        let jj = m.j_scale();
        let expect = [[-1.0, 1.0, -1.0, 0.0], [1.0, 0.0, 1.0, -1.0], [-1.0, 1.0, 0.0, 1.0], [0.0, -1.0, 1.0, -1.0]];
        for a in 0..4 {
            let diag = m.delta_ls[a];
            assert!((diag - expect[a][a] * jj).abs() < 1e-12 * jj);
            for b in 0..4 {
                if a != b {
                    assert!((m.j[a][b] - expect[a][b] * jj).abs() < 1e-12 * jj);
                }
            }
        }
    }

    #[test]
    fn f_form_agrees() {
        for xi in [0.36, 1.1996, xi_dark()] {
            for n in [2usize, 7, 20] {
                let s = spec(n, xi);
                let d = drive(n);
                for a in 0..n {
                    for b in 0..n {
                        if a != b {
                            let x = effective_j(&s, &d, a, b).unwrap();
                            let y = effective_j_f_form(&s, &d, a, b).unwrap();
                            let scale = 4.0 * d.omega * d.omega / s.nearest_shift();
                            assert!((x - y).abs() <= 1e-12 * scale.max(x.abs()), "{xi} {n} {a} {b}: {x} {y} {scale}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn piecewise_table_matches_truncated_sum() {
        for n in 4..=20 {
            let s = spec(n, xi_dark());
            let d = drive(n);
            let m = build_effective_model(&s, &d, Truncation::NextNearest).unwrap();
            for i in 0..n {
                let pw = piecewise_light_shift(n, xi_dark(), 6, m.j_scale(), i);
                assert!((pw - m.delta_ls[i]).abs() < 1e-12 * m.j_scale() * n as f64, "{n} {i}");
            }
        }
    }

    #[test]
    fn pair_light_shift() {
        let s = spec(2, 1.3);
        let d = drive(2);
        let delta = d.resolved_delta(&s);
        let o2 = d.omega * d.omega;
        let expect = o2 / delta - o2 / (delta - s.nearest_shift());
        assert_relative_eq!(effective_light_shift(&s, &d, 0).unwrap(), expect, max_relative = 1e-14);
    }

    #[test]
    fn truncation_effect_is_small_at_resonance() {
        let s = spec(10, xi_dark());
        let d = drive(10);
        let a = build_effective_model(&s, &d, Truncation::Full).unwrap();
        let b = build_effective_model(&s, &d, Truncation::NextNearest).unwrap();
        let jj = a.j_scale();
        for i in 0..10 {
            for k in 0..10 {
                assert!((a.j[i][k] - b.j[i][k]).abs() < 2e-2 * jj);
            }
            assert!((a.delta_ls[i] - b.delta_ls[i]).abs() < 2e-2 * jj * 10.0);
        }
    }

    #[test]
    fn dark_resonance_cancels() {
        let s = spec(12, xi_dark());
        let d = drive(12);
        let m = build_effective_model(&s, &d, Truncation::Full).unwrap();
        for i in 0..10 {
            assert!((m.j[i][i + 1] + m.j[i][i + 2]).abs() < 1e-12 * m.j_scale());
        }
    }

    #[test]
    fn h2_operator() {
        let s = spec(4, xi_dark());
        let d = drive(4);
        let m = build_effective_model(&s, &d, Truncation::NextNearest).unwrap();
        let basis = Basis::full(4).unwrap();
        let h2 = build_h2_operator(&m, &basis);
        for pair in [0b0011usize, 0b0110, 0b1100] {
            assert_relative_eq!(h2[(pair, 0)].re, m.j_scale() / 2.0, max_relative = 1e-14);
        }
        assert_eq!(h2[(0b1001, 0)].re, 0.0);
        // from |r_0⟩ only the pairs on free sites 1–2 and 2–3 are reachable
        for k in 0..16 {
            let expect = if k == 0b0111 || k == 0b1101 { m.h2_amp } else { 0.0 };
            assert_eq!(h2[(k, 0b0001)], C64::new(expect, 0.0));
        }
        assert_eq!(hermiticity_defect(&h2), 0.0);

        let e = build_effective_hamiltonian(&m);
        assert_eq!(e.nrows(), 8);
        assert_eq!(hermiticity_defect(&e), 0.0);
    }

    #[test]
    fn weak_drive_scaling() {
        let s = spec(5, 1.4);
        let mut d = drive(5);
        d.omega = 1e-9;
        let m = build_effective_model(&s, &d, Truncation::Full).unwrap();
        assert!(m.j.iter().flatten().all(|x| x.abs() < 1e-15));
        assert!(m.delta_ls.iter().all(|x| x.abs() < 1e-15));
    }

    #[test]
    fn spectrum_examples() {
        let s = spec(4, xi_dark());
        let r = rydberg_spectrum(&s, None).unwrap();
        let nn = s.nearest_shift();
        assert_eq!(r.v[0], 0.0);
        assert_eq!(r.v[1], 0.0);
        assert_relative_eq!(r.v[2], nn, max_relative = 1e-14);
        assert_relative_eq!(r.two_photon_detuning[0], nn / 2.0, max_relative = 1e-14);
        assert_relative_eq!(r.v[3], nn * (2.0 + 1.0 / 3.0), max_relative = 1e-12);
        assert!(r.v.windows(2).all(|w| w[1] >= w[0]));

        let s2 = spec(2, 1.5);
        let d = drive(2);
        let r2 = rydberg_spectrum(&s2, Some(&d)).unwrap();
        assert_eq!(r2.anharmonicity.len(), 1);
        assert!(r2.blockaded[0]);
    }
}
