//! Monte-Carlo wavefunction unravelling.
//!
//! Each trajectory evolves an unnormalized ψ under H_nh with the exact step
//! propagator; a jump happens when ‖ψ‖² falls below a uniform threshold.
//! The crossing time inside a step is located by bisection on a Taylor
//! expansion of the propagator about the step start, the channel is drawn
//! with weight Γ_k‖L_kψ‖², and ψ is renormalized after the jump.
//!
//! Trajectory `k` draws from `ChaCha8Rng::seed_from_u64(seed)` on stream `k`,
//! so results do not depend on how trajectories are scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{DynamicsError, EvolutionProblem};
use crate::exec::Execution;
use crate::linalg::{expm, norm1};
use crate::states::QuantumState;
use crate::{CMatrix, CVector, C64};

/// Upper bound on the propagator step.
pub const MAX_STEP: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryFailure {
    pub index: usize,
    pub t: f64,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct TrajectoryEnsemble {
    pub n_traj: usize,
    pub seed: u64,
    pub times: Vec<f64>,
    /// Normalized ψ per completed trajectory per sample (problem basis).
    pub states: Vec<Vec<CVector>>,
    /// Index of each completed trajectory.
    pub indices: Vec<usize>,
    pub jump_counts: Vec<usize>,
    /// Average |ψ⟩⟨ψ| per sample, summed in trajectory-index order.
    pub mean_rho: Vec<CMatrix>,
    pub failures: Vec<TrajectoryFailure>,
}

struct Stepper<'a> {
    problem: &'a EvolutionProblem,
    gen: CMatrix,
    segments: Vec<(usize, f64, usize)>,
    propagators: Vec<CMatrix>,
}

impl<'a> Stepper<'a> {
    fn new(problem: &'a EvolutionProblem) -> Self {
        let gen = problem.non_hermitian_hamiltonian() * C64::new(0.0, -1.0);
        let max_step = MAX_STEP.min(0.5 / norm1(&gen).max(1e-300));
        let mut segments = Vec::new();
        let mut propagators: Vec<CMatrix> = Vec::new();
        let mut keys: Vec<u64> = Vec::new();
        let mut prev = 0.0;
        for &t in &problem.sample_times {
            let span = t - prev;
            if span > 0.0 {
                let n = (span / max_step).ceil() as usize;
                let h = span / n as f64;
                let key = h.to_bits();
                let slot = match keys.iter().position(|&k| k == key) {
                    Some(s) => s,
                    None => {
                        keys.push(key);
                        propagators.push(expm(&(&gen * C64::new(h, 0.0))));
                        keys.len() - 1
                    }
                };
                segments.push((n, h, slot));
            } else {
                segments.push((0, 0.0, usize::MAX));
            }
            prev = t;
        }
        Self { problem, gen, segments, propagators }
    }

    /// Taylor coefficients v_k = G^k ψ / k! until they are negligible.
    fn taylor(&self, psi: &CVector, tau_max: f64) -> Vec<CVector> {
        let mut terms = vec![psi.clone()];
        for k in 1..40 {
            let next = (&self.gen * terms.last().expect("non-empty")) * C64::new(1.0 / k as f64, 0.0);
            let size = next.norm() * tau_max.powi(k);
            terms.push(next);
            if size < 1e-17 * psi.norm() {
                break;
            }
        }
        terms
    }

    fn eval(terms: &[CVector], tau: f64) -> CVector {
        // Horner in τ
        let mut acc = terms.last().expect("non-empty").clone();
        for v in terms.iter().rev().skip(1) {
            acc = acc * C64::new(tau, 0.0) + v;
        }
        acc
    }

    fn run(&self, psi0: &CVector, seed: u64, index: usize) -> Result<(Vec<CVector>, usize), TrajectoryFailure> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index as u64);
        let mut threshold = 1.0 - rng.random::<f64>();
        let mut psi = psi0.clone();
        let mut jumps = 0usize;
        let mut t = 0.0;
        let mut samples = Vec::with_capacity(self.segments.len());
        let mut scratch = vec![C64::new(0.0, 0.0); psi.len()];
        for &(n, h, slot) in &self.segments {
            for _ in 0..n {
                let mut remaining = h;
                let mut first = true;
                loop {
                    let phi = if first { &self.propagators[slot] * &psi } else { Self::eval(&self.taylor(&psi, remaining), remaining) };
                    if phi.norm_squared() > threshold {
                        psi = phi;
                        break;
                    }
                    let terms = self.taylor(&psi, remaining);
                    let (mut lo, mut hi) = (0.0, remaining);
                    for _ in 0..60 {
                        let mid = 0.5 * (lo + hi);
                        if Self::eval(&terms, mid).norm_squared() > threshold {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    let at_jump = Self::eval(&terms, hi);
                    let weights: Vec<f64> = self
                        .problem
                        .jumps
                        .iter()
                        .map(|j| j.rate * j.expectation_ldl(at_jump.as_slice()))
                        .collect();
                    let total: f64 = weights.iter().sum();
                    if !(total > 0.0) || !total.is_finite() {
                        return Err(TrajectoryFailure { index, t: t + h - remaining + hi, reason: "no jump channel has weight".into() });
                    }
                    let mut u = rng.random::<f64>() * total;
                    let mut channel = weights.len() - 1;
                    for (k, w) in weights.iter().enumerate() {
                        if u < *w {
                            channel = k;
                            break;
                        }
                        u -= w;
                    }
                    self.problem.jumps[channel].apply(at_jump.as_slice(), &mut scratch);
                    let after = CVector::from_column_slice(&scratch);
                    let norm = after.norm();
                    if !(norm > 1e-300) {
                        return Err(TrajectoryFailure { index, t: t + h - remaining + hi, reason: "state collapsed to zero norm".into() });
                    }
                    psi = after / C64::new(norm, 0.0);
                    jumps += 1;
                    threshold = 1.0 - rng.random::<f64>();
                    remaining -= hi;
                    first = false;
                    if remaining <= 0.0 {
                        break;
                    }
                }
            }
            t += n as f64 * h;
            let norm = psi.norm();
            if !(norm > 0.0) || !norm.is_finite() {
                return Err(TrajectoryFailure { index, t, reason: "state norm underflow".into() });
            }
            samples.push(&psi / C64::new(norm, 0.0));
        }
        Ok((samples, jumps))
    }
}

/// Run `n_traj` trajectories from the pure state `psi0` (full-space, restricted
/// to the problem basis).
pub fn evolve_trajectories(problem: &EvolutionProblem, psi0: &QuantumState, n_traj: usize, seed: u64, exec: Execution) -> Result<TrajectoryEnsemble, DynamicsError> {
    let start = match psi0 {
        QuantumState::Pure { amplitudes, .. } => problem.basis.restrict_vector(amplitudes),
        QuantumState::Mixed { .. } => return Err(DynamicsError::NotPure),
    };
    let norm = start.norm();
    if !(norm > 0.0) {
        return Err(DynamicsError::NotPure);
    }
    let start = start / C64::new(norm, 0.0);
    let stepper = Stepper::new(problem);
    let results = exec.map(n_traj, |k| stepper.run(&start, seed, k));

    let d = problem.dim();
    let n_samples = problem.sample_times.len();
    let mut ens = TrajectoryEnsemble {
        n_traj,
        seed,
        times: problem.sample_times.clone(),
        states: Vec::new(),
        indices: Vec::new(),
        jump_counts: Vec::new(),
        mean_rho: vec![CMatrix::zeros(d, d); n_samples],
        failures: Vec::new(),
    };
    for (k, r) in results.into_iter().enumerate() {
        match r {
            Ok((samples, jumps)) => {
                for (acc, psi) in ens.mean_rho.iter_mut().zip(&samples) {
                    *acc += psi * psi.adjoint();
                }
                ens.states.push(samples);
                ens.indices.push(k);
                ens.jump_counts.push(jumps);
            }
            Err(f) => ens.failures.push(f),
        }
    }
    let done = ens.states.len();
    if done == 0 {
        return Err(DynamicsError::AllTrajectoriesFailed(ens.failures.len()));
    }
    for acc in &mut ens.mean_rho {
        *acc /= C64::new(done as f64, 0.0);
    }
    Ok(ens)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dissipation::JumpOperator;
    use crate::states::Basis;

    fn decaying_atom(times: Vec<f64>) -> EvolutionProblem {
        let b = Basis::full(1).unwrap();
        let jump = JumpOperator::lowering(&b, 0, 1.0).unwrap();
        let t_final = *times.last().unwrap();
        EvolutionProblem::new(b, CMatrix::zeros(2, 2), vec![jump], t_final, times).unwrap()
    }

    #[test]
    fn survival_matches_exponential() {
        let p = decaying_atom(vec![0.5, 1.0, 2.0]);
        let excited = QuantumState::basis_state(1, 1).unwrap();
        let n = 10_000;
        let ens = evolve_trajectories(&p, &excited, n, 7, Execution::Sequential).unwrap();
        for (t, rho) in ens.times.iter().zip(&ens.mean_rho) {
            let expect = (-t).exp();
            let se = (expect * (1.0 - expect) / n as f64).sqrt();
            let got = rho[(1, 1)].re;
            assert!((got - expect).abs() < 3.0 * se, "t={t}: {got} vs {expect}");
        }
        assert!(ens.failures.is_empty());
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let p = decaying_atom(vec![0.3, 0.9]);
        let excited = QuantumState::basis_state(1, 1).unwrap();
        let a = evolve_trajectories(&p, &excited, 10, 42, Execution::Sequential).unwrap();
        let b = evolve_trajectories(&p, &excited, 10, 42, Execution::Sequential).unwrap();
        let c = evolve_trajectories(&p, &excited, 10, 42, Execution::Parallel(Some(3))).unwrap();
        for k in 0..2 {
            assert_eq!(a.mean_rho[k], b.mean_rho[k]);
            assert_eq!(a.mean_rho[k], c.mean_rho[k]);
        }
    }

    #[test]
    fn rejects_mixed_start() {
        let p = decaying_atom(vec![1.0]);
        let m = QuantumState::mixed_unchecked(1, CMatrix::identity(2, 2) * C64::new(0.5, 0.0));
        assert!(matches!(evolve_trajectories(&p, &m, 1, 0, Execution::Sequential), Err(DynamicsError::NotPure)));
    }
}
