//! Steady states from the Liouvillian kernel.
//!
//! The generator is represented as a real matrix on the Hilbert–Schmidt
//! orthonormal Hermitian basis {|k⟩⟨k|, (|k⟩⟨l|+|l⟩⟨k|)/√2,
//! i(|k⟩⟨l|−|l⟩⟨k|)/√2}. Trace preservation makes the diagonal rows sum to
//! zero, so one of them is replaced by the trace constraint and the bordered
//! system is solved by LU.

use nalgebra::{DMatrix, DVector, Schur};

use super::{DynamicsError, EvolutionProblem, MAX_STEADY_DIM};
use crate::{CMatrix, C64};

/// Threshold on the second smallest Liouvillian singular value.
pub const UNIQUENESS_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct SteadyState {
    /// ρ_ss on the problem basis, Hermitian with unit trace.
    pub rho: CMatrix,
    /// Second smallest singular value of the Liouvillian, when checked.
    pub gap: Option<f64>,
    /// Largest Re λ, when the spectrum was computed.
    pub max_real_part: Option<f64>,
}

fn n_coords(d: usize) -> usize {
    d * d
}

/// Hermitian coordinates of `m`; the imaginary part of non-Hermitian input
/// is ignored.
fn to_coords(m: &CMatrix) -> DVector<f64> {
    let d = m.nrows();
    let mut x = DVector::zeros(n_coords(d));
    let s = std::f64::consts::SQRT_2;
    let mut idx = d;
    for k in 0..d {
        x[k] = m[(k, k)].re;
        for l in (k + 1)..d {
            let z = 0.5 * (m[(k, l)] + m[(l, k)].conj());
            x[idx] = s * z.re;
            x[idx + 1] = s * z.im;
            idx += 2;
        }
    }
    x
}

fn from_coords(x: &DVector<f64>, d: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut idx = d;
    for k in 0..d {
        m[(k, k)] = C64::new(x[k], 0.0);
        for l in (k + 1)..d {
            let z = C64::new(x[idx], x[idx + 1]) * s;
            m[(k, l)] = z;
            m[(l, k)] = z.conj();
            idx += 2;
        }
    }
    m
}

/// Real representation of the Liouvillian, `d² × d²`.
pub fn liouvillian_real(problem: &EvolutionProblem) -> Result<DMatrix<f64>, DynamicsError> {
    let d = problem.dim();
    if d > MAX_STEADY_DIM {
        return Err(DynamicsError::DimensionLimit { dim: d, limit: MAX_STEADY_DIM });
    }
    let n = n_coords(d);
    let mut out = DMatrix::zeros(n, n);
    for b in 0..n {
        let mut e = DVector::zeros(n);
        e[b] = 1.0;
        let col = to_coords(&problem.rhs(&from_coords(&e, d)));
        out.set_column(b, &col);
    }
    Ok(out)
}

/// Eigenvalues of the Liouvillian.
pub fn liouvillian_spectrum(problem: &EvolutionProblem) -> Result<Vec<C64>, DynamicsError> {
    let l = liouvillian_real(problem)?;
    // the QR iteration occasionally stalls on one orientation
    let schur = Schur::try_new(l.clone(), f64::EPSILON, 100_000)
        .or_else(|| Schur::try_new(l.transpose(), f64::EPSILON, 100_000))
        .ok_or(DynamicsError::SpectrumFailed)?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

/// Eigenvalues of the Liouvillian on the traceless operators. The trace is a
/// left null vector, so the full spectrum is these plus the exact zero of the
/// steady state; removing it analytically keeps its ε‖L‖ round-off out of the
/// remaining eigenvalues' real parts.
pub fn liouvillian_spectrum_deflated(problem: &EvolutionProblem) -> Result<Vec<C64>, DynamicsError> {
    let d = problem.dim();
    let l = liouvillian_real(problem)?;
    let n = l.nrows();
    // coordinates (Tr ρ, x_1, …): x_0 = Tr ρ − Σ_{0<k<d} x_k
    let m = DMatrix::from_fn(n - 1, n - 1, |i, j| {
        let (i, j) = (i + 1, j + 1);
        l[(i, j)] - if j < d { l[(i, 0)] } else { 0.0 }
    });
    let schur = Schur::try_new(m.clone(), f64::EPSILON, 100_000)
        .or_else(|| Schur::try_new(m.transpose(), f64::EPSILON, 100_000))
        .ok_or(DynamicsError::SpectrumFailed)?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

/// Singular values of the Liouvillian, ascending.
pub fn liouvillian_singular_values(problem: &EvolutionProblem) -> Result<Vec<f64>, DynamicsError> {
    let l = liouvillian_real(problem)?;
    let mut sv: Vec<f64> = l.singular_values().iter().copied().collect();
    sv.sort_by(f64::total_cmp);
    Ok(sv)
}

/// Null-space steady state. Uniqueness is checked on the second smallest
/// singular value of the Liouvillian (the kernel dimension); the largest
/// eigenvalue real part is reported when the eigenvalue iteration converges.
pub fn steady_state(problem: &EvolutionProblem) -> Result<SteadyState, DynamicsError> {
    let sv = liouvillian_singular_values(problem)?;
    let gap = sv.get(1).copied().unwrap_or(f64::INFINITY);
    if gap < UNIQUENESS_TOL {
        return Err(DynamicsError::NonUniqueSteadyState(gap));
    }
    let mut ss = steady_state_unchecked(problem)?;
    ss.gap = Some(gap);
    ss.max_real_part = liouvillian_spectrum(problem).ok().and_then(|s| s.iter().map(|z| z.re).reduce(f64::max));
    Ok(ss)
}

/// Null-space steady state without the spectral check (for parameter
/// sweeps).
pub fn steady_state_unchecked(problem: &EvolutionProblem) -> Result<SteadyState, DynamicsError> {
    let d = problem.dim();
    let mut l = liouvillian_real(problem)?;
    let n = l.nrows();
    for c in 0..n {
        l[(0, c)] = if c < d { 1.0 } else { 0.0 };
    }
    let mut rhs = DVector::zeros(n);
    rhs[0] = 1.0;
    let x = l.full_piv_lu().solve(&rhs).ok_or(DynamicsError::SingularLiouvillian)?;
    let mut rho = from_coords(&x, d);
    let tr = rho.trace();
    rho /= tr;
    Ok(SteadyState { rho, gap: None, max_real_part: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dissipation::JumpOperator;
    use crate::states::Basis;
    use approx::assert_abs_diff_eq;

    #[test]
    fn coordinates_round_trip() {
        let m = CMatrix::from_row_slice(2, 2, &[C64::new(0.3, 0.0), C64::new(0.1, 0.2), C64::new(0.1, -0.2), C64::new(0.7, 0.0)]);
        let back = from_coords(&to_coords(&m), 2);
        assert!((back - &m).norm() < 1e-15);
        // orthonormal: coordinate norm equals Frobenius norm
        assert_abs_diff_eq!(to_coords(&m).norm(), m.norm(), epsilon = 1e-15);
    }

    #[test]
    fn decaying_atom_relaxes_to_ground() {
        let b = Basis::full(1).unwrap();
        let jump = JumpOperator::lowering(&b, 0, 1.0).unwrap();
        let mut h = CMatrix::zeros(2, 2);
        h[(1, 1)] = C64::new(0.3, 0.0);
        let p = EvolutionProblem::new(b, h, vec![jump], 1.0, vec![1.0]).unwrap();
        let ss = steady_state(&p).unwrap();
        assert_abs_diff_eq!(ss.rho[(0, 0)].re, 1.0, epsilon = 1e-14);
        assert!(ss.max_real_part.unwrap() <= 1e-10);
    }

    #[test]
    fn deflation_drops_only_the_zero_mode() {
        let b = Basis::full(1).unwrap();
        let jump = JumpOperator::lowering(&b, 0, 1.0).unwrap();
        let mut h = CMatrix::zeros(2, 2);
        h[(1, 1)] = C64::new(0.3, 0.0);
        h[(0, 1)] = C64::new(0.2, 0.0);
        h[(1, 0)] = C64::new(0.2, 0.0);
        let p = EvolutionProblem::new(b, h, vec![jump], 1.0, vec![1.0]).unwrap();
        let full = liouvillian_spectrum(&p).unwrap();
        let mut defl = liouvillian_spectrum_deflated(&p).unwrap();
        defl.push(C64::new(0.0, 0.0));
        assert_eq!(full.len(), defl.len());
        for a in &full {
            let k = (0..defl.len()).min_by(|&i, &j| (defl[i] - a).norm().total_cmp(&(defl[j] - a).norm())).unwrap();
            assert!((defl.swap_remove(k) - a).norm() < 1e-10, "{a}");
        }
    }

    #[test]
    fn closed_system_is_not_unique() {
        let b = Basis::full(1).unwrap();
        let p = EvolutionProblem::new(b, CMatrix::zeros(2, 2), vec![], 1.0, vec![1.0]).unwrap();
        assert!(matches!(steady_state(&p), Err(DynamicsError::NonUniqueSteadyState(_)) | Err(DynamicsError::SingularLiouvillian)));
    }

    #[test]
    fn driven_atom_matches_closed_form() {
        // resonant two-level atom, H = Ω σx
        let omega = 0.7;
        let gamma = 1.0;
        let b = Basis::full(1).unwrap();
        let jump = JumpOperator::lowering(&b, 0, gamma).unwrap();
        let mut h = CMatrix::zeros(2, 2);
        h[(0, 1)] = C64::new(omega, 0.0);
        h[(1, 0)] = C64::new(omega, 0.0);
        let p = EvolutionProblem::new(b, h, vec![jump], 1.0, vec![1.0]).unwrap();
        let ss = steady_state(&p).unwrap();
        // Rabi frequency 2Ω: ρ_rr = s/(2(1+s)), s = 2(2Ω)²/Γ²
        let s = 2.0 * (2.0 * omega).powi(2) / (gamma * gamma);
        assert_abs_diff_eq!(ss.rho[(1, 1)].re, s / (2.0 * (1.0 + s)), epsilon = 1e-12);
    }
}
