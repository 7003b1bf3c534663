//! Fidelity, concurrence and the {Δ, y_c} W-state uncertainty witness.

mod bounds;
mod witness;

pub use bounds::{bound_delta, bound_delta_for, boundary_table, hull_convergence, zero_bounds, BoundaryRow, HULL_GRID};
pub use witness::{build_w_basis, certify_depth, witness, witness_from_parts, WProjectorBasis, WitnessReport};

use serde::{Deserialize, Serialize};

use crate::linalg::{eigvalsh, sqrtm_psd};
use crate::states::{QuantumState, StateError};
use crate::{CMatrix, CVector, C64};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EntanglementError {
    #[error(transparent)]
    State(#[from] StateError),
    #[error("dimension mismatch: state {state}, target {target}")]
    DimensionMismatch { state: usize, target: usize },
    #[error("target state must be pure")]
    TargetNotPure,
    #[error("concurrence needs a 4×4 density matrix, got {0}×{0}")]
    NotTwoQubit(usize),
    #[error("register of {n_a} sites does not fit a basis of {n_m}")]
    RegisterTooLarge { n_a: usize, n_m: usize },
    #[error("W basis depth must be at least 1")]
    BadDepth,
    #[error("bound tier k−1 = {k} outside 1..={n_m}")]
    BadTier { k: usize, n_m: usize },
}

/// ⟨ψ|ρ|ψ⟩ for a pure target on the same register.
pub fn fidelity(state: &QuantumState, target: &QuantumState) -> Result<f64, EntanglementError> {
    let psi = match target {
        QuantumState::Pure { amplitudes, .. } => amplitudes,
        QuantumState::Mixed { .. } => return Err(EntanglementError::TargetNotPure),
    };
    if state.dim() != target.dim() {
        return Err(EntanglementError::DimensionMismatch { state: state.dim(), target: target.dim() });
    }
    Ok(state.overlap_with(psi))
}

/// Wootters concurrence of a two-qubit density matrix.
pub fn concurrence(rho: &CMatrix) -> Result<f64, EntanglementError> {
    if rho.nrows() != 4 || rho.ncols() != 4 {
        return Err(EntanglementError::NotTwoQubit(rho.nrows()));
    }
    QuantumState::mixed(2, rho.clone())?;
    // σy⊗σy
    let mut flip = CMatrix::zeros(4, 4);
    flip[(0, 3)] = C64::new(-1.0, 0.0);
    flip[(3, 0)] = C64::new(-1.0, 0.0);
    flip[(1, 2)] = C64::new(1.0, 0.0);
    flip[(2, 1)] = C64::new(1.0, 0.0);
    let tilde = &flip * rho.conjugate() * &flip;
    let s = sqrtm_psd(rho);
    let mut lambdas: Vec<f64> = eigvalsh(&(&s * tilde * &s)).into_iter().map(|m| m.max(0.0).sqrt()).collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

/// Coherence-based upper estimates of Δ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceBound {
    /// Mean |d_ij| over pairs of the normalized single-excitation block.
    pub mean_coherence: f64,
    /// ((N−1)/N)(1 − N² d̃²).
    pub coherence_form: f64,
    /// min over the transverse angle of the collective spin variance, 2Σ_{i<j}|d_ij|.
    pub min_transverse_variance: f64,
    /// (N/(N−1))[1 − (min⟨δ²S_t⟩/(N−1))²].
    pub transverse_form: f64,
    /// Δ of the same state in the smallest enclosing W basis.
    pub delta: f64,
    /// Δ ≤ coherence form.
    pub holds: bool,
}

/// Both Δ̃ forms for a state on N ≥ 2 sites; the register is the whole state.
pub fn variance_bound(state: &QuantumState) -> Result<VarianceBound, EntanglementError> {
    let (stats, block) = state.single_excitation_block();
    variance_bound_from_parts(stats.p1, &block)
}

/// As [`variance_bound`] from the unnormalized single-excitation block.
pub fn variance_bound_from_parts(p1: f64, block: &CMatrix) -> Result<VarianceBound, EntanglementError> {
    let n = block.nrows();
    let nf = n as f64;
    let norm = if p1 > 0.0 { p1 } else { 1.0 };
    let mut sum_abs = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            sum_abs += block[(i, j)].norm() / norm;
        }
    }
    let pairs = nf * (nf - 1.0) / 2.0;
    let mean = if pairs > 0.0 { sum_abs / pairs } else { 0.0 };
    let coherence_form = (nf - 1.0) / nf * (1.0 - nf * nf * mean * mean);
    let min_var = 2.0 * sum_abs;
    let transverse_form = if n > 1 { nf / (nf - 1.0) * (1.0 - (min_var / (nf - 1.0)).powi(2)) } else { 0.0 };
    let m = (n.max(2) as f64).log2().ceil() as u32;
    let basis = build_w_basis(m.max(1))?;
    let stats = crate::states::ExcitationStats { p0: 1.0 - p1, p1, p_ge2: 0.0 };
    let report = witness_from_parts(stats, block, &basis, n)?;
    Ok(VarianceBound {
        mean_coherence: mean,
        coherence_form,
        min_transverse_variance: min_var,
        transverse_form,
        delta: report.delta,
        holds: report.delta <= coherence_form + 1e-12,
    })
}

/// Embed a single-excitation amplitude vector as a pure state.
pub fn single_excitation_state(amplitudes: &[C64]) -> Result<QuantumState, EntanglementError> {
    let n = amplitudes.len();
    let sites: Vec<usize> = (0..n).collect();
    Ok(crate::states::make_w_state(n, &sites, Some(amplitudes))?)
}

/// |ψ⟩ from a full-space vector without validation; used for targets.
pub fn pure_target(n_sites: usize, v: CVector) -> QuantumState {
    QuantumState::Pure { n_sites, amplitudes: v }
}
