//! Driven-dissipative Rydberg lattice simulation and W-state entanglement
//! certification.
//!
//! Units: energies and rates are in units of the engineered reservoir decay
//! rate Γ (so Γ = 1 unless stated otherwise), times in 1/Γ, lengths in units
//! of the blockade distance d_B. Sites are indexed from 0; in a computational
//! basis index, bit `i` set means site `i` is in the Rydberg state |r⟩.
//!
//! The crate is organised bottom-up:
//!
//! * [`lattice`]: zigzag geometry and van der Waals blockade shifts
//! * [`states`]: basis bookkeeping, pure/mixed states, partial traces
//! * [`hamiltonians`]: the full Rydberg Hamiltonian and the perturbative
//!   effective model (H_xy + H₂)
//! * [`dissipation`]: reservoir jump operators and the dressed decay rate
//! * [`dynamics`]: master equation, quantum trajectories, steady states
//! * [`entanglement`]: fidelity, concurrence and the {Δ, y_c} witness
//! * [`darkstate`]: single-excitation dark eigenstates and scaling scans
//! * [`exec`]: sequential / rayon execution policy

pub mod darkstate;
pub mod dissipation;
pub mod dynamics;
pub mod entanglement;
pub mod exec;
pub mod hamiltonians;
pub mod lattice;
pub mod linalg;
pub mod states;

pub use num_complex::Complex64 as C64;

/// Dense complex matrix used for Hamiltonians and density matrices.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense complex column vector used for pure states.
pub type CVector = nalgebra::DVector<C64>;

pub use darkstate::{DarkScanResult, ReservoirRule, ScalingRow};
pub use dissipation::{DressingConfig, JumpOperator};
pub use dynamics::{EvolutionProblem, Tier};
pub use entanglement::{WProjectorBasis, WitnessReport};
pub use exec::Execution;
pub use hamiltonians::{DriveConfig, EffectiveModel, PhysicalSystem, Truncation};
pub use lattice::LatticeSpec;
pub use states::{Basis, QuantumState};

/// Crate-level error.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Lattice(#[from] lattice::LatticeError),
    #[error(transparent)]
    State(#[from] states::StateError),
    #[error(transparent)]
    Hamiltonian(#[from] hamiltonians::HamiltonianError),
    #[error(transparent)]
    Dissipation(#[from] dissipation::DissipationError),
    #[error(transparent)]
    Dynamics(#[from] dynamics::DynamicsError),
    #[error(transparent)]
    Entanglement(#[from] entanglement::EntanglementError),
    #[error(transparent)]
    DarkState(#[from] darkstate::DarkStateError),
}

pub type Result<T> = std::result::Result<T, Error>;
