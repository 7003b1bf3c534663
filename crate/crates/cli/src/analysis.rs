//! Register observables along a trajectory of density matrices.

use rydpump::entanglement::{concurrence, fidelity, witness, WProjectorBasis};
use rydpump::states::make_w_state;
use rydpump::{Basis, CMatrix, QuantumState};
use serde::Serialize;

use crate::output::Table;
use crate::row;

/// Observables of the probed register at one time.
#[derive(Debug, Clone, Serialize)]
pub struct Observables {
    pub t: f64,
    pub p0: f64,
    pub p1: f64,
    pub p_ge2: f64,
    /// Fidelity with the uniform W state on the register.
    pub fidelity: f64,
    /// NaN unless the register has two sites.
    pub concurrence: f64,
    pub delta: f64,
    pub y_c: Option<f64>,
    pub k_min: usize,
}

pub const OBSERVABLE_HEADER: [&str; 9] = ["t", "p0", "p1", "p_ge2", "fidelity", "concurrence", "delta", "y_c", "k_min"];

pub struct RegisterProbe {
    pub register: Vec<usize>,
    target: QuantumState,
    basis: WProjectorBasis,
}

impl RegisterProbe {
    pub fn new(register: &[usize]) -> rydpump::Result<Self> {
        let n_a = register.len();
        let target = make_w_state(n_a, &(0..n_a).collect::<Vec<_>>(), None)?;
        let basis = WProjectorBasis::for_register(n_a)?;
        Ok(Self { register: register.to_vec(), target, basis })
    }

    pub fn n_a(&self) -> usize {
        self.register.len()
    }

    pub fn observe(&self, basis: &Basis, rho: &CMatrix, t: f64) -> rydpump::Result<Observables> {
        let full = QuantumState::from_basis_density(basis, rho)?;
        self.observe_state(&full, t)
    }

    pub fn observe_state(&self, full: &QuantumState, t: f64) -> rydpump::Result<Observables> {
        let reduced = full.partial_trace(&self.register)?;
        let f = fidelity(&reduced, &self.target)?;
        let c = if self.n_a() == 2 { concurrence(&reduced.density())? } else { f64::NAN };
        let w = witness(&reduced, &self.basis)?;
        Ok(Observables {
            t,
            p0: w.p0,
            p1: w.p1,
            p_ge2: w.p_ge2,
            fidelity: f,
            concurrence: c,
            delta: w.delta,
            y_c: w.y_c,
            k_min: w.k_min,
        })
    }
}

pub fn observables_table(obs: &[Observables]) -> Table {
    let mut t = Table::new(&OBSERVABLE_HEADER);
    for o in obs {
        t.push(row![o.t, o.p0, o.p1, o.p_ge2, o.fidelity, o.concurrence, o.delta, o.y_c.unwrap_or(f64::NAN), o.k_min]);
    }
    t
}

/// t_k for k = 2..=n_a: the first sample from which the certified depth
/// stays at k or above until the end of the series.
pub fn crossing_times(obs: &[Observables], n_a: usize) -> Vec<Option<f64>> {
    (2..=n_a)
        .map(|k| {
            let mut first = None;
            for o in obs.iter().rev() {
                if o.k_min >= k {
                    first = Some(o.t);
                } else {
                    break;
                }
            }
            first
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obs(t: f64, k: usize) -> Observables {
        Observables { t, p0: 0.0, p1: 1.0, p_ge2: 0.0, fidelity: 0.0, concurrence: f64::NAN, delta: 0.0, y_c: Some(0.0), k_min: k }
    }

    #[test]
    fn crossings_need_to_persist() {
        let series: Vec<_> = [1, 2, 1, 2, 3, 3, 4, 4].iter().enumerate().map(|(i, &k)| obs(i as f64, k)).collect();
        assert_eq!(crossing_times(&series, 4), vec![Some(3.0), Some(4.0), Some(6.0)]);
        let dropped: Vec<_> = [1, 3, 2].iter().enumerate().map(|(i, &k)| obs(i as f64, k)).collect();
        assert_eq!(crossing_times(&dropped, 3), vec![Some(1.0), None]);
    }

    #[test]
    fn w_state_on_the_register() {
        let probe = RegisterProbe::new(&[1, 2]).unwrap();
        let w = make_w_state(4, &[1, 2], None).unwrap();
        let o = probe.observe_state(&w, 0.0).unwrap();
        assert!((o.fidelity - 1.0).abs() < 1e-12);
        assert!((o.concurrence - 1.0).abs() < 1e-9);
        assert_eq!(o.k_min, 2);
    }
}
