//! Open-system time evolution.
//!
//! All three solvers share the Lindblad generator
//!
//!   ρ̇ = −i(H_nh ρ − ρ H_nh†) + Σ_k Γ_k L_k ρ L_k†,  H_nh = H − (i/2) Σ_k Γ_k L_k†L_k
//!
//! on a [`Basis`] which is either the full 2^N space or the effective-tier
//! basis (ground, singles, nearest-neighbour doubles).

mod master;
mod steady;
mod trajectories;

pub use master::{evolve_master, evolve_master_unchecked, MasterSolution, PhysicalityCheck};
pub use steady::{liouvillian_real, liouvillian_singular_values, liouvillian_spectrum, liouvillian_spectrum_deflated, steady_state, steady_state_unchecked, SteadyState};
pub use trajectories::{evolve_trajectories, TrajectoryEnsemble, TrajectoryFailure};

use serde::{Deserialize, Serialize};

use crate::dissipation::{lindblad_jumps, DissipationError, JumpOperator};
use crate::hamiltonians::{build_effective_hamiltonian, build_effective_model, build_full_hamiltonian, HamiltonianError, PhysicalSystem, Truncation};
use crate::states::{Basis, QuantumState, StateError};
use crate::{CMatrix, CVector, C64};

/// Largest basis dimension accepted by the dense master-equation solver.
pub const MAX_MASTER_DIM: usize = 256;
/// Largest basis dimension for the dense Liouvillian null-space method.
pub const MAX_STEADY_DIM: usize = 32;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DynamicsError {
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
    #[error(transparent)]
    Dissipation(#[from] DissipationError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error("dimension {dim} exceeds the limit {limit} for this solver")]
    DimensionLimit { dim: usize, limit: usize },
    #[error("operator dimensions disagree: hamiltonian {hamiltonian}, jump {jump}, basis {basis}")]
    DimensionMismatch { hamiltonian: usize, jump: usize, basis: usize },
    #[error("sample times must be sorted and lie in [0, t_final]")]
    BadSampleTimes,
    #[error("t_final must be positive and finite, got {0}")]
    BadDuration(f64),
    #[error("adaptive step fell to {h:e} at t = {t}")]
    StepSizeFailure { t: f64, h: f64 },
    #[error("sample at t = {t} is unphysical: {detail}")]
    Unphysical { t: f64, detail: String },
    #[error("trajectory initial state must be pure")]
    NotPure,
    #[error("steady state is not unique: second smallest Liouvillian singular value {0:e}")]
    NonUniqueSteadyState(f64),
    #[error("Liouvillian eigenvalue iteration did not converge")]
    SpectrumFailed,
    #[error("Liouvillian system is singular")]
    SingularLiouvillian,
    #[error("no trajectory completed ({0} aborted)")]
    AllTrajectoriesFailed(usize),
}

/// Which model generates the dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tier {
    /// Full Rydberg Hamiltonian on 2^N states.
    Full,
    /// Effective hopping model plus pair pump on 2N states.
    Effective,
}

/// Hamiltonian, jumps and sampling grid on a common basis.
#[derive(Debug, Clone)]
pub struct EvolutionProblem {
    pub basis: Basis,
    pub hamiltonian: CMatrix,
    pub jumps: Vec<JumpOperator>,
    pub t_final: f64,
    pub sample_times: Vec<f64>,
    h_nh: CMatrix,
}

impl EvolutionProblem {
    pub fn new(basis: Basis, hamiltonian: CMatrix, jumps: Vec<JumpOperator>, t_final: f64, sample_times: Vec<f64>) -> Result<Self, DynamicsError> {
        let d = basis.dim();
        if hamiltonian.nrows() != d || hamiltonian.ncols() != d {
            return Err(DynamicsError::DimensionMismatch { hamiltonian: hamiltonian.nrows(), jump: d, basis: d });
        }
        if let Some(j) = jumps.iter().find(|j| j.dim != d) {
            return Err(DynamicsError::DimensionMismatch { hamiltonian: d, jump: j.dim, basis: d });
        }
        if !(t_final > 0.0 && t_final.is_finite()) {
            return Err(DynamicsError::BadDuration(t_final));
        }
        let sorted = sample_times.windows(2).all(|w| w[0] <= w[1]);
        let in_range = sample_times.iter().all(|&t| (0.0..=t_final).contains(&t));
        if !sorted || !in_range {
            return Err(DynamicsError::BadSampleTimes);
        }
        let mut h_nh = hamiltonian.clone();
        for jump in &jumps {
            for (k, v) in jump.number_diagonal().into_iter().enumerate() {
                h_nh[(k, k)] -= C64::new(0.0, 0.5 * jump.rate * v);
            }
        }
        Ok(Self { basis, hamiltonian, jumps, t_final, sample_times, h_nh })
    }

    /// Problem for a physical system on the chosen tier with `n_samples`
    /// evenly spaced samples on [0, t_final].
    pub fn from_system(system: &PhysicalSystem, tier: Tier, truncation: Truncation, t_final: f64, n_samples: usize) -> Result<Self, DynamicsError> {
        let n = system.n_sites();
        let (basis, h) = match tier {
            Tier::Full => (Basis::full(n)?, build_full_hamiltonian(&system.lattice, &system.drive)?),
            Tier::Effective => {
                let model = build_effective_model(&system.lattice, &system.drive, truncation)?;
                (Basis::effective(n), build_effective_hamiltonian(&model))
            }
        };
        let jumps = lindblad_jumps(&system.drive, &basis)?;
        Self::new(basis, h, jumps, t_final, linspace(t_final, n_samples))
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// H − (i/2) Σ Γ_k L_k†L_k.
    pub fn non_hermitian_hamiltonian(&self) -> &CMatrix {
        &self.h_nh
    }

    /// Lindblad right-hand side for a Hermitian ρ.
    pub fn rhs(&self, rho: &CMatrix) -> CMatrix {
        let a = &self.h_nh * rho;
        let i = C64::new(0.0, 1.0);
        let mut out = (a.adjoint() - &a) * i;
        for jump in &self.jumps {
            jump.add_sandwich(rho, &mut out);
        }
        out
    }

    /// Density matrix of |G⟩ on this basis.
    pub fn ground_density(&self) -> CMatrix {
        let d = self.dim();
        let g = self.basis.index_of(0).expect("ground state in every basis");
        let mut rho = CMatrix::zeros(d, d);
        rho[(g, g)] = C64::new(1.0, 0.0);
        rho
    }

    /// Restrict a full-space state to this basis (amplitudes outside the
    /// basis are dropped).
    pub fn restrict_state(&self, state: &QuantumState) -> CMatrix {
        let masks = self.basis.masks();
        match state {
            QuantumState::Pure { amplitudes, .. } => {
                let v = CVector::from_iterator(masks.len(), masks.iter().map(|&m| amplitudes[m as usize]));
                &v * v.adjoint()
            }
            QuantumState::Mixed { rho, .. } => CMatrix::from_fn(masks.len(), masks.len(), |a, b| rho[(masks[a] as usize, masks[b] as usize)]),
        }
    }
}

/// `n` evenly spaced points on [0, t_final], both ends included.
pub fn linspace(t_final: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![t_final],
        _ => (0..n).map(|k| t_final * k as f64 / (n - 1) as f64).collect(),
    }
}
