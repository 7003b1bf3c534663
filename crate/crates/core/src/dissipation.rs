//! Reservoir decay: per-site lowering operators and the dressed decay rate
//! of a Rydberg level admixed with a short-lived intermediate state.

use serde::{Deserialize, Serialize};

use crate::hamiltonians::{DriveConfig, HamiltonianError};
use crate::states::Basis;
use crate::{CMatrix, C64};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DissipationError {
    #[error(transparent)]
    Drive(#[from] HamiltonianError),
    #[error("negative decay rate {rate} on site {site}")]
    NegativeRate { site: usize, rate: f64 },
    #[error("gamma_e must be positive, got {0}")]
    BadGammaE(f64),
    #[error("omega_d must be non-negative, got {0}")]
    BadOmegaD(f64),
    #[error("t_final must be positive, got {0}")]
    BadDuration(f64),
    #[error("step {dt} too coarse: dt·max(γ_e, Ω_d, |Δ_d|) = {product} ≥ 0.1")]
    StepTooCoarse { dt: f64, product: f64 },
    #[error("not enough points in the fit window")]
    FitWindow,
}

/// σ⁻ on one site, restricted to a basis: a list of `from → to` index
/// pairs, each with coefficient one.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpOperator {
    pub site: usize,
    pub rate: f64,
    pub dim: usize,
    pub transitions: Vec<(usize, usize)>,
}

impl JumpOperator {
    /// Lowering operator |g⟩⟨r| on `site`. Transitions leaving the basis are
    /// dropped.
    pub fn lowering(basis: &Basis, site: usize, rate: f64) -> Result<Self, DissipationError> {
        if rate < 0.0 || !rate.is_finite() {
            return Err(DissipationError::NegativeRate { site, rate });
        }
        let bit = 1u64 << site;
        let transitions = (0..basis.dim())
            .filter(|&k| basis.mask(k) & bit != 0)
            .filter_map(|k| basis.index_of(basis.mask(k) ^ bit).map(|t| (k, t)))
            .collect();
        Ok(Self { site, rate, dim: basis.dim(), transitions })
    }

    pub fn to_matrix(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for &(f, t) in &self.transitions {
            m[(t, f)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Diagonal of L†L (a projector, since every `from` appears once).
    pub fn number_diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.dim];
        for &(f, _) in &self.transitions {
            d[f] = 1.0;
        }
        d
    }

    /// L ψ.
    pub fn apply(&self, psi: &[C64], out: &mut [C64]) {
        out.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        for &(f, t) in &self.transitions {
            out[t] += psi[f];
        }
    }

    /// ‖L ψ‖².
    pub fn expectation_ldl(&self, psi: &[C64]) -> f64 {
        self.transitions.iter().map(|&(f, _)| psi[f].norm_sqr()).sum()
    }

    /// out += rate · L ρ L†.
    pub fn add_sandwich(&self, rho: &CMatrix, out: &mut CMatrix) {
        for &(fa, ta) in &self.transitions {
            for &(fb, tb) in &self.transitions {
                out[(ta, tb)] += rho[(fa, fb)] * self.rate;
            }
        }
    }
}

/// One lowering operator per site with rate Γ_i.
pub fn lindblad_jumps(drive: &DriveConfig, basis: &Basis) -> Result<Vec<JumpOperator>, DissipationError> {
    let n = basis.n_sites();
    drive.validate(n)?;
    drive
        .site_rates(n)
        .into_iter()
        .enumerate()
        .map(|(i, rate)| JumpOperator::lowering(basis, i, rate))
        .collect()
}

/// Σ_k Γ_k (L_k ρ L_k† − ½{L_k†L_k, ρ}).
pub fn dissipator(jumps: &[JumpOperator], rho: &CMatrix) -> CMatrix {
    let d = rho.nrows();
    let mut out = CMatrix::zeros(d, d);
    let mut decay = vec![0.0; d];
    for jump in jumps {
        jump.add_sandwich(rho, &mut out);
        for (k, v) in jump.number_diagonal().into_iter().enumerate() {
            decay[k] += jump.rate * v;
        }
    }
    for a in 0..d {
        for b in 0..d {
            out[(a, b)] -= rho[(a, b)] * (0.5 * (decay[a] + decay[b]));
        }
    }
    out
}

/// Λ-system dressing of |r⟩ by a short-lived |e⟩. Rates in units of Γ_r.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DressingConfig {
    pub omega_d: f64,
    pub delta_d: f64,
    pub gamma_e: f64,
    /// Bare Rydberg decay, 1 in these units.
    pub gamma_r: f64,
}

impl DressingConfig {
    pub fn new(omega_d: f64, delta_d: f64, gamma_e: f64) -> Self {
        Self { omega_d, delta_d, gamma_e, gamma_r: 1.0 }
    }

    pub fn validate(&self) -> Result<(), DissipationError> {
        if !(self.gamma_e > 0.0 && self.gamma_e.is_finite()) {
            return Err(DissipationError::BadGammaE(self.gamma_e));
        }
        if !(self.omega_d >= 0.0 && self.omega_d.is_finite()) {
            return Err(DissipationError::BadOmegaD(self.omega_d));
        }
        Ok(())
    }
}

/// Γ = 2γ_eff with γ_eff = γ_r + γ_e Ω_d²/(Δ_d² + γ_e²), γ = Γ/2.
pub fn effective_decay_rate(cfg: &DressingConfig) -> f64 {
    let gr = cfg.gamma_r / 2.0;
    let ge = cfg.gamma_e / 2.0;
    let eff = gr + ge * cfg.omega_d * cfg.omega_d / (cfg.delta_d * cfg.delta_d + ge * ge);
    2.0 * eff
}

/// Coherences sampled at every integration step.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochSeries {
    pub t: Vec<f64>,
    pub sigma_ge: Vec<C64>,
    pub sigma_gr: Vec<C64>,
}

impl BlochSeries {
    /// |σ_gr|², the Rydberg population envelope.
    pub fn population(&self) -> Vec<f64> {
        self.sigma_gr.iter().map(|z| z.norm_sqr()).collect()
    }
}

/// Integrates
///
///   σ̇_ge = (−γ_e + iΔ_d) σ_ge + iΩ_d σ_gr
///   σ̇_gr = −γ_r σ_gr + iΩ_d σ_ge
///
/// from σ_gr = 1, σ_ge = 0 with classical RK4.
pub fn integrate_bloch(cfg: &DressingConfig, t_final: f64, dt: f64) -> Result<BlochSeries, DissipationError> {
    cfg.validate()?;
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(DissipationError::BadDuration(t_final));
    }
    let ge = cfg.gamma_e / 2.0;
    let gr = cfg.gamma_r / 2.0;
    let product = dt * ge.max(cfg.omega_d).max(cfg.delta_d.abs()).max(gr);
    if !(dt > 0.0) || product >= 0.1 {
        return Err(DissipationError::StepTooCoarse { dt, product });
    }
    let i = C64::new(0.0, 1.0);
    let a_ge = C64::new(-ge, cfg.delta_d);
    let rhs = |x: [C64; 2]| -> [C64; 2] { [a_ge * x[0] + i * cfg.omega_d * x[1], -gr * x[1] + i * cfg.omega_d * x[0]] };
    let steps = (t_final / dt).ceil() as usize;
    let h = t_final / steps as f64;
    let mut x = [C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
    let mut out = BlochSeries {
        t: Vec::with_capacity(steps + 1),
        sigma_ge: Vec::with_capacity(steps + 1),
        sigma_gr: Vec::with_capacity(steps + 1),
    };
    for k in 0..=steps {
        out.t.push(k as f64 * h);
        out.sigma_ge.push(x[0]);
        out.sigma_gr.push(x[1]);
        if k == steps {
            break;
        }
        let k1 = rhs(x);
        let k2 = rhs([x[0] + k1[0] * (h / 2.0), x[1] + k1[1] * (h / 2.0)]);
        let k3 = rhs([x[0] + k2[0] * (h / 2.0), x[1] + k2[1] * (h / 2.0)]);
        let k4 = rhs([x[0] + k3[0] * h, x[1] + k3[1] * h]);
        for c in 0..2 {
            x[c] += (k1[c] + k2[c] * 2.0 + k3[c] * 2.0 + k4[c]) * (h / 6.0);
        }
    }
    Ok(out)
}

/// Least-squares slope of −ln|σ_gr|² over t ∈ [0, t_max].
pub fn fit_decay_rate(series: &BlochSeries, t_max: f64) -> Result<f64, DissipationError> {
    let pts: Vec<(f64, f64)> = series
        .t
        .iter()
        .zip(series.population())
        .filter(|(t, p)| **t <= t_max && *p > 0.0)
        .map(|(t, p)| (*t, p.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(DissipationError::FitWindow);
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    Ok(-sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};

    #[test]
    fn single_atom_decay_rate() {
        let basis = Basis::full(1).unwrap();
        let drive = DriveConfig { omega: 1.0, delta: None, gamma_r: 0.0, gamma_reservoir: 1.0, reservoir_sites: vec![0] };
        let jumps = lindblad_jumps(&drive, &basis).unwrap();
        let mut rho = CMatrix::zeros(2, 2);
        rho[(1, 1)] = C64::new(1.0, 0.0);
        let d = dissipator(&jumps, &rho);
        assert_abs_diff_eq!(d[(1, 1)].re, -1.0);
        assert_abs_diff_eq!(d[(0, 0)].re, 1.0);
    }

    #[test]
    fn lowering_on_pair() {
        let basis = Basis::full(2).unwrap();
        let l = JumpOperator::lowering(&basis, 0, 1.0).unwrap();
        let mut psi = vec![C64::new(0.0, 0.0); 4];
        psi[0b11] = C64::new(1.0, 0.0);
        let mut out = vec![C64::new(0.0, 0.0); 4];
        l.apply(&psi, &mut out);
        // site 0 lowered: |rr⟩ -> site 1 still excited
        assert_eq!(out[0b10].re, 1.0);
        assert_eq!(out.iter().map(|z| z.norm_sqr()).sum::<f64>(), 1.0);
        assert!(JumpOperator::lowering(&basis, 0, -1.0).is_err());
    }

    #[test]
    fn effective_basis_jumps_stay_inside() {
        let basis = Basis::effective(4);
        let l = JumpOperator::lowering(&basis, 1, 1.0).unwrap();
        // r1 -> G, r01 -> r0, r12 -> r2
        assert_eq!(l.transitions.len(), 3);
    }

    #[test]
    fn dissipator_is_trace_preserving() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let basis = Basis::full(3).unwrap();
        let mut drive = DriveConfig::new(1.0, 0.3, 3);
        drive.reservoir_sites = vec![0, 2];
        let jumps = lindblad_jumps(&drive, &basis).unwrap();
        for _ in 0..100 {
            let x = CMatrix::from_fn(8, 8, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
            let h = &x + x.adjoint();
            assert!(dissipator(&jumps, &h).trace().norm() < 1e-12);
        }
    }

    #[test]
    fn decay_rate_values() {
        let undressed = DressingConfig::new(0.0, 0.0, 1e4);
        assert_abs_diff_eq!(effective_decay_rate(&undressed), 1.0);
        let weak = DressingConfig::new(10.0, 0.0, 1e4);
        assert_abs_diff_eq!(effective_decay_rate(&weak), 1.0 + 4.0 * 100.0 / 1e4, epsilon = 1e-12);
        let strong = DressingConfig::new(1e3, 0.0, 1e4);
        let g = effective_decay_rate(&strong);
        assert!(g > 100.0 && g < 1e4, "{g}");
    }

    #[test]
    fn decay_rate_monotonicity() {
        let mut last = 0.0;
        for k in 0..20 {
            let g = effective_decay_rate(&DressingConfig::new(k as f64 * 50.0, 30.0, 1e4));
            assert!(g > last || k == 0);
            last = g;
        }
        let mut last = f64::INFINITY;
        for k in 0..20 {
            let g = effective_decay_rate(&DressingConfig::new(300.0, k as f64 * 400.0, 1e4));
            assert!(g < last);
            last = g;
        }
    }

    #[test]
    fn undressed_coherence_decays_at_half_rate() {
        let cfg = DressingConfig::new(0.0, 0.0, 1e4);
        let s = integrate_bloch(&cfg, 2.0, 1e-5).unwrap();
        let last = *s.sigma_gr.last().unwrap();
        assert_abs_diff_eq!(last.re, (-0.5f64 * 2.0).exp(), epsilon = 1e-10);
    }

    #[test]
    fn fitted_rate_matches_closed_form() {
        let cfg = DressingConfig::new(1e3, 0.0, 1e4);
        let rate = effective_decay_rate(&cfg);
        let s = integrate_bloch(&cfg, 5.0 / rate, 1e-5).unwrap();
        let fit = fit_decay_rate(&s, 5.0 / rate).unwrap();
        assert!((fit / rate - 1.0).abs() < 0.1, "{fit} vs {rate}");
    }

    #[test]
    fn strong_dressing_breaks_scaling() {
        let cfg = DressingConfig::new(5e3, 0.0, 1e4);
        let naive = 1.0 + 4.0 * cfg.omega_d * cfg.omega_d / cfg.gamma_e;
        let s = integrate_bloch(&cfg, 5.0 / naive * 10.0, 5e-6).unwrap();
        let fit = fit_decay_rate(&s, 5.0 / naive * 10.0).unwrap();
        assert!((fit / naive - 1.0).abs() > 0.2, "{fit} vs {naive}");
    }

    #[test]
    fn rejects_coarse_step() {
        let cfg = DressingConfig::new(1e3, 0.0, 1e4);
        assert!(matches!(integrate_bloch(&cfg, 1.0, 1e-3), Err(DissipationError::StepTooCoarse { .. })));
    }
}
