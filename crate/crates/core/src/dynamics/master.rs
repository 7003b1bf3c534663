//! Adaptive Dormand–Prince 5(4) integration of the master equation.

use serde::{Deserialize, Serialize};

use super::{DynamicsError, EvolutionProblem, MAX_MASTER_DIM};
use crate::linalg::{eigvalsh, hermiticity_defect};
use crate::{CMatrix, C64};

/// Absolute element-wise local error tolerance.
pub const MASTER_TOL: f64 = 1e-8;

const TRACE_TOL: f64 = 1e-9;
const HERMITIAN_TOL: f64 = 1e-9;
const POSITIVITY_TOL: f64 = -1e-7;

/// Physicality diagnostics for one sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalityCheck {
    pub t: f64,
    pub trace_error: f64,
    pub hermiticity_defect: f64,
    pub min_eigenvalue: f64,
}

impl PhysicalityCheck {
    pub fn of(t: f64, rho: &CMatrix) -> Self {
        Self {
            t,
            trace_error: (rho.trace() - C64::new(1.0, 0.0)).norm(),
            hermiticity_defect: hermiticity_defect(rho),
            min_eigenvalue: eigvalsh(rho).first().copied().unwrap_or(0.0),
        }
    }

    pub fn passes(&self) -> bool {
        self.trace_error < TRACE_TOL && self.hermiticity_defect < HERMITIAN_TOL && self.min_eigenvalue > POSITIVITY_TOL
    }
}

#[derive(Debug, Clone)]
pub struct MasterSolution {
    pub times: Vec<f64>,
    /// ρ(t) on the problem basis.
    pub states: Vec<CMatrix>,
    pub checks: Vec<PhysicalityCheck>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

// Dormand–Prince tableau (the generator is autonomous, so the nodes are not needed)
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// 5th-order minus 4th-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrate from `rho0` (on the problem basis) and return ρ at every
/// sample time. Fails if any sample violates the physicality tolerances.
pub fn evolve_master(problem: &EvolutionProblem, rho0: &CMatrix) -> Result<MasterSolution, DynamicsError> {
    let sol = evolve_master_unchecked(problem, rho0)?;
    if let Some(bad) = sol.checks.iter().find(|c| !c.passes()) {
        return Err(DynamicsError::Unphysical {
            t: bad.t,
            detail: format!(
                "trace error {:e}, hermiticity {:e}, min eigenvalue {:e}",
                bad.trace_error, bad.hermiticity_defect, bad.min_eigenvalue
            ),
        });
    }
    Ok(sol)
}

/// As [`evolve_master`] but returns the diagnostics instead of failing.
pub fn evolve_master_unchecked(problem: &EvolutionProblem, rho0: &CMatrix) -> Result<MasterSolution, DynamicsError> {
    let d = problem.dim();
    if d > MAX_MASTER_DIM {
        return Err(DynamicsError::DimensionLimit { dim: d, limit: MAX_MASTER_DIM });
    }
    if rho0.nrows() != d || rho0.ncols() != d {
        return Err(DynamicsError::DimensionMismatch { hamiltonian: d, jump: d, basis: rho0.nrows() });
    }
    let mut rho = rho0.clone();
    let mut t = 0.0;
    let scale = crate::linalg::norm1(problem.non_hermitian_hamiltonian()).max(1.0);
    let mut h = 0.01 / scale;
    let mut k1 = problem.rhs(&rho);
    let mut out = MasterSolution { times: Vec::new(), states: Vec::new(), checks: Vec::new(), accepted_steps: 0, rejected_steps: 0 };
    for &target in &problem.sample_times {
        while target - t > 1e-14 * target.max(1.0) {
            let remaining = target - t;
            let last = h >= remaining;
            let step = if last { remaining } else { h };
            let (next, k_next, err) = dp_step(problem, &rho, &k1, step);
            if err <= MASTER_TOL {
                rho = next;
                k1 = k_next;
                t = if last { target } else { t + step };
                out.accepted_steps += 1;
            } else {
                out.rejected_steps += 1;
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * (MASTER_TOL / err).powf(0.2)).clamp(0.2, 5.0) };
            let proposed = step * factor;
            // keep the controller's step when we only shortened it to land on a sample
            h = if last && err <= MASTER_TOL { h.max(proposed) } else { proposed };
            if h < 1e-13 * t.max(1.0) {
                return Err(DynamicsError::StepSizeFailure { t, h });
            }
        }
        out.times.push(target);
        out.checks.push(PhysicalityCheck::of(target, &rho));
        out.states.push(rho.clone());
    }
    Ok(out)
}

fn dp_step(problem: &EvolutionProblem, y: &CMatrix, k1: &CMatrix, h: f64) -> (CMatrix, CMatrix, f64) {
    let mut k: Vec<CMatrix> = Vec::with_capacity(7);
    k.push(k1.clone());
    for s in 1..7 {
        let mut arg = y.clone();
        for (r, kr) in k.iter().enumerate() {
            let a = A[s][r];
            if a != 0.0 {
                arg += kr * C64::new(h * a, 0.0);
            }
        }
        let ks = problem.rhs(&arg);
        if s == 6 {
            // stage 7 is evaluated at the 5th-order solution (FSAL)
            let mut err = CMatrix::zeros(y.nrows(), y.ncols());
            let mut k_all = k.clone();
            k_all.push(ks.clone());
            for (r, kr) in k_all.iter().enumerate() {
                if E[r] != 0.0 {
                    err += kr * C64::new(h * E[r], 0.0);
                }
            }
            let e = err.iter().map(|z| z.norm()).fold(0.0, f64::max);
            return (arg, ks, e);
        }
        k.push(ks);
    }
    unreachable!("loop returns at the last stage")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dissipation::JumpOperator;
    use crate::states::Basis;
    use approx::assert_abs_diff_eq;

    #[test]
    fn free_decay() {
        let b = Basis::full(1).unwrap();
        let jump = JumpOperator::lowering(&b, 0, 1.0).unwrap();
        let p = EvolutionProblem::new(b, CMatrix::zeros(2, 2), vec![jump], 3.0, vec![0.0, 1.0, 3.0]).unwrap();
        let mut rho = CMatrix::zeros(2, 2);
        rho[(1, 1)] = C64::new(1.0, 0.0);
        let sol = evolve_master(&p, &rho).unwrap();
        for (t, r) in sol.times.iter().zip(&sol.states) {
            assert_abs_diff_eq!(r[(1, 1)].re, (-t).exp(), epsilon = 1e-7);
        }
    }

    #[test]
    fn rabi_oscillation() {
        let b = Basis::full(1).unwrap();
        let omega = 1.3;
        let mut h = CMatrix::zeros(2, 2);
        h[(0, 1)] = C64::new(omega, 0.0);
        h[(1, 0)] = C64::new(omega, 0.0);
        let times: Vec<f64> = (0..=20).map(|k| k as f64 * 0.25).collect();
        let p = EvolutionProblem::new(b, h, vec![], 5.0, times).unwrap();
        let mut rho = CMatrix::zeros(2, 2);
        rho[(0, 0)] = C64::new(1.0, 0.0);
        let sol = evolve_master(&p, &rho).unwrap();
        for (t, r) in sol.times.iter().zip(&sol.states) {
            assert_abs_diff_eq!(r[(1, 1)].re, (omega * t).sin().powi(2), epsilon = 1e-6);
        }
        assert!(sol.checks.iter().all(|c| c.passes()));
    }
}
