use proptest::prelude::*;
use rydpump::dissipation::lindblad_jumps;
use rydpump::entanglement::{build_w_basis, concurrence, variance_bound_from_parts, witness};
use rydpump::hamiltonians::build_full_hamiltonian;
use rydpump::linalg::hermiticity_defect;
use rydpump::states::Basis;
use rydpump::{CMatrix, CVector, EvolutionProblem, PhysicalSystem, QuantumState, C64};

fn complex_vec(len: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len)
}

fn random_density(n_sites: usize, parts: &[Vec<(f64, f64)>], weights: &[f64]) -> CMatrix {
    let d = 1 << n_sites;
    let mut rho = CMatrix::zeros(d, d);
    let total: f64 = weights.iter().sum();
    for (v, w) in parts.iter().zip(weights) {
        let psi = CVector::from_iterator(d, v.iter().map(|&(a, b)| C64::new(a, b)));
        let psi = &psi / C64::new(psi.norm().max(1e-12), 0.0);
        rho += &psi * psi.adjoint() * C64::new(w / total, 0.0);
    }
    rho
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lindblad_generator_preserves_trace(re in complex_vec(64), xi in 0.9f64..1.8, a0 in 0.2f64..0.6) {
        let sys = PhysicalSystem::new(3, xi, a0, 5.0, 100.0).unwrap();
        let basis = Basis::full(3).unwrap();
        let h = build_full_hamiltonian(&sys.lattice, &sys.drive).unwrap();
        let jumps = lindblad_jumps(&sys.drive, &basis).unwrap();
        let p = EvolutionProblem::new(basis, h, jumps, 1.0, vec![1.0]).unwrap();
        let m = CMatrix::from_fn(8, 8, |i, j| C64::new(re[i * 8 + j].0, re[i * 8 + j].1));
        let herm = (&m + m.adjoint()) * C64::new(0.5, 0.0);
        let d = p.rhs(&herm);
        let scale = herm.norm() * p.hamiltonian.norm();
        prop_assert!(d.trace().norm() < 1e-12 * scale.max(1.0));
        prop_assert!(hermiticity_defect(&d) < 1e-12 * scale.max(1.0));
    }

    #[test]
    fn projectors_resolve_single_excitations(m in 1u32..7) {
        let b = build_w_basis(m).unwrap();
        let n = b.n_m;
        for i in 0..n {
            for j in 0..n {
                let s: f64 = b.projectors.iter().map(|v| v[i] * v[j]).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                prop_assert!((s - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn delta_identity_on_single_excitations(amps in complex_vec(4)) {
        let coeffs: Vec<C64> = amps.iter().map(|&(a, b)| C64::new(a, b)).collect();
        prop_assume!(coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>() > 1e-6);
        let w = rydpump::states::make_w_state(4, &[0, 1, 2, 3], Some(&coeffs)).unwrap();
        let r = witness(&w, &build_w_basis(2).unwrap()).unwrap();
        let alt = 1.0 - r.projector_expectations.iter().map(|p| p * p).sum::<f64>();
        prop_assert!((r.delta - alt).abs() < 1e-10);
        prop_assert!(r.delta >= 0.0 && r.delta <= 0.75 + 1e-12);
    }

    #[test]
    fn ground_noise_never_raises_depth(parts in prop::collection::vec(complex_vec(16), 1..4), lambda in 0.0f64..1.0) {
        let weights = vec![1.0; parts.len()];
        let rho = random_density(4, &parts, &weights);
        let basis = build_w_basis(2).unwrap();
        let clean = witness(&QuantumState::mixed(4, rho.clone()).unwrap(), &basis).unwrap();
        let mut noisy = rho * C64::new(1.0 - lambda, 0.0);
        noisy[(0, 0)] += C64::new(lambda, 0.0);
        let dirty = witness(&QuantumState::mixed(4, noisy).unwrap(), &basis).unwrap();
        prop_assert!(dirty.k_min <= clean.k_min);
    }

    #[test]
    fn concurrence_is_bounded(parts in prop::collection::vec(complex_vec(4), 1..4)) {
        let weights = vec![1.0; parts.len()];
        let c = concurrence(&random_density(2, &parts, &weights)).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-9).contains(&c));
    }

    #[test]
    fn coherence_bound_holds_in_the_aligned_frame(amps in prop::collection::vec(0.0f64..1.0, 4), mix in prop::collection::vec(0.0f64..1.0, 4)) {
        // ρ₁ = λ|a⟩⟨a| + (1−λ) diag(w): real non-negative coherences
        prop_assume!(amps.iter().sum::<f64>() > 1e-3 && mix.iter().sum::<f64>() > 1e-3);
        let na: f64 = amps.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nw: f64 = mix.iter().sum();
        let lambda = mix[0];
        let block = CMatrix::from_fn(4, 4, |i, j| {
            let coh = lambda * amps[i] * amps[j] / (na * na);
            let diag = if i == j { (1.0 - lambda) * mix[i] / nw } else { 0.0 };
            C64::new(coh + diag, 0.0)
        });
        let v = variance_bound_from_parts(1.0, &block).unwrap();
        prop_assert!(v.holds, "{v:?}");
    }
}
