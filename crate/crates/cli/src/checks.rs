//! Acceptance criteria 1 to 9, each a single function returning PASS/FAIL
//! with the measured numbers. Run them with `rydpump check <id>` or the
//! `acceptance` test target.

use std::fmt;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rydpump::darkstate::{chain_block, dark_resonance_xi, dark_scan, matches_pattern, scaling_scan, ChainParams, DarkFamily, ReservoirRule};
use rydpump::dissipation::{effective_decay_rate, fit_decay_rate, integrate_bloch, DressingConfig};
use rydpump::dynamics::{evolve_master_unchecked, evolve_trajectories, liouvillian_real, liouvillian_spectrum, liouvillian_spectrum_deflated, steady_state, MasterSolution, PhysicalityCheck};
use rydpump::entanglement::{build_w_basis, variance_bound, witness, WProjectorBasis};
use rydpump::hamiltonians::{build_effective_model, effective_j, effective_j_f_form, piecewise_light_shift};
use rydpump::linalg::trace_distance;
use rydpump::states::make_w_state;
use rydpump::{CMatrix, CVector, EvolutionProblem, Execution, PhysicalSystem, QuantumState, Tier, Truncation, C64};

use crate::analysis::{crossing_times, Observables, RegisterProbe};
use crate::scenarios::bloch_window;
use crate::CliError;

pub const CRITERIA: [u8; 9] = [1, 2, 3, 4, 5, 6, 7, 8, 9];

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: u8,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "criterion {} {}: {} [{:.1} s]", self.id, verdict, self.detail, self.seconds)
    }
}

pub fn run_criterion(id: u8, exec: Execution) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let (pass, detail) = match id {
        1 => criterion1()?,
        2 => criterion2()?,
        3 => criterion3(exec)?,
        4 => criterion4()?,
        5 => criterion5(exec)?,
        6 => criterion6()?,
        7 => criterion7()?,
        8 => criterion8()?,
        9 => criterion9()?,
        _ => return Err(CliError::Config(vec![crate::config::FieldError { path: "criterion".into(), message: format!("no criterion {id}, expected 1 to 9") }])),
    };
    Ok(Outcome { id, pass, detail, seconds: start.elapsed().as_secs_f64() })
}

fn system(n: usize, xi: f64, a0: f64) -> Result<PhysicalSystem, CliError> {
    Ok(PhysicalSystem::new(n, xi, a0, 1e3, 1e4)?)
}

fn interior(n: usize) -> Vec<usize> {
    (1..n - 1).collect()
}

fn steady_observables(n: usize, xi: f64, a0: f64, tier: Tier) -> Result<Observables, CliError> {
    let p = EvolutionProblem::from_system(&system(n, xi, a0)?, tier, Truncation::Full, 1.0, 2)?;
    let ss = steady_state(&p)?;
    Ok(RegisterProbe::new(&interior(n))?.observe(&p.basis, &ss.rho, f64::INFINITY)?)
}

fn master_run(n: usize, xi: f64, a0: f64, t_final: f64, n_samples: usize) -> Result<(EvolutionProblem, MasterSolution), CliError> {
    let p = EvolutionProblem::from_system(&system(n, xi, a0)?, Tier::Effective, Truncation::Full, t_final, n_samples)?;
    let sol = evolve_master_unchecked(&p, &p.ground_density())?;
    Ok((p, sol))
}

fn observe_all(p: &EvolutionProblem, states: &[CMatrix], times: &[f64], probe: &RegisterProbe) -> Result<Vec<Observables>, CliError> {
    Ok(times.iter().zip(states).map(|(&t, rho)| probe.observe(&p.basis, rho, t)).collect::<rydpump::Result<Vec<_>>>()?)
}

/// N = 4 steady state on the effective tier.
fn criterion1() -> Result<(bool, String), CliError> {
    let o = steady_observables(4, dark_resonance_xi(6), 0.26, Tier::Effective)?;
    let pass = o.fidelity >= 0.99 && (o.fidelity - 0.9982).abs() <= 0.01;
    Ok((pass, format!("steady F2 = {:.5} (target 0.9982 +/- 0.01, floor 0.99)", o.fidelity)))
}

// (N, a0, t_final, samples) at the dark resonance
const FIG2B: (usize, f64, f64, usize) = (4, 0.26, 200.0, 401);
// (N, xi, a0, t_final, samples)
const FIG3: (usize, f64, f64, f64, usize) = (6, 1.1996, 0.285, 300.0, 601);

fn fig2b_run() -> Result<(EvolutionProblem, MasterSolution), CliError> {
    let (n, a0, t, s) = FIG2B;
    master_run(n, dark_resonance_xi(6), a0, t, s)
}

fn fig3_run() -> Result<(EvolutionProblem, MasterSolution), CliError> {
    let (n, xi, a0, t, s) = FIG3;
    master_run(n, xi, a0, t, s)
}

/// N = 4 dynamics: fidelity reaches 0.99 and concurrence rises monotonically.
fn criterion2() -> Result<(bool, String), CliError> {
    let (p, sol) = fig2b_run()?;
    let obs = observe_all(&p, &sol.states, &sol.times, &RegisterProbe::new(&interior(4))?)?;
    let reach = obs.iter().find(|o| o.fidelity >= 0.99).map(|o| o.t);
    let last = obs.last().expect("samples");
    let mut drops = 0;
    let mut worst = 0.0f64;
    for w in obs.windows(2).filter(|w| w[0].t >= 10.0) {
        let d = w[0].concurrence - w[1].concurrence;
        if d > 1e-9 {
            drops += 1;
            worst = worst.max(d);
        }
    }
    let pass = reach.is_some_and(|t| t <= 200.0) && drops == 0 && last.concurrence >= 0.98;
    let reach_s = reach.map(|t| format!("{t:.1}")).unwrap_or_else(|| "never".into());
    Ok((
        pass,
        format!(
            "F2 >= 0.99 first at t = {reach_s}, F2(200) = {:.5}, C(200) = {:.5}, concurrence decreases after t = 10: {drops} steps (largest {worst:.2e})",
            last.fidelity, last.concurrence
        ),
    ))
}

/// N = 6: steady F4, trajectories against the master equation, ordered
/// witness crossings, steady {Δ, y_c}.
fn criterion3(exec: Execution) -> Result<(bool, String), CliError> {
    let (n, xi, a0, _, _) = FIG3;
    let steady = steady_observables(n, xi, a0, Tier::Effective)?;
    let (p, sol) = fig3_run()?;
    let probe = RegisterProbe::new(&interior(n))?;
    let obs = observe_all(&p, &sol.states, &sol.times, &probe)?;
    let t = crossing_times(&obs, 4);

    // trajectories on a coarser grid, same physics
    let coarse = EvolutionProblem::from_system(&system(n, xi, a0)?, Tier::Effective, Truncation::Full, 300.0, 61)?;
    let ens = evolve_trajectories(&coarse, &QuantumState::ground(n)?, 1000, 1, exec)?;
    let master_coarse = evolve_master_unchecked(&coarse, &coarse.ground_density())?;
    let td = master_coarse.states.iter().zip(&ens.mean_rho).map(|(a, b)| trace_distance(a, b)).fold(0.0, f64::max);

    let fid_ok = steady.fidelity >= 0.98;
    let traj_ok = td <= 0.05 && ens.failures.is_empty();
    let order_ok = match (t[0], t[1], t[2]) {
        (Some(t2), Some(t3), Some(t4)) => t2 < t3 && t3 < t4 && (30.0..=300.0).contains(&t4),
        _ => false,
    };
    let y = steady.y_c.unwrap_or(f64::INFINITY);
    let plane_ok = steady.delta <= 3e-2 && y <= 1e-3;
    let fmt_t = |x: Option<f64>| x.map(|v| format!("{v:.1}")).unwrap_or_else(|| "none".into());
    Ok((
        fid_ok && traj_ok && order_ok && plane_ok,
        format!(
            "steady F4 = {:.5}; 1000 trajectories max trace distance {:.4}; crossings t2 = {}, t3 = {}, t4 = {}; steady Delta = {:.3e}, y_c = {:.3e}",
            steady.fidelity,
            td,
            fmt_t(t[0]),
            fmt_t(t[1]),
            fmt_t(t[2]),
            steady.delta,
            y
        ),
    ))
}

fn listed(family: DarkFamily, max: usize) -> Vec<usize> {
    (2..=max).filter(|&n| family.listed(n)).collect()
}

/// Unique dark state with edge reservoir for every listed family member.
fn criterion4() -> Result<(bool, String), CliError> {
    let xi = dark_resonance_xi(6);
    let mut not_unique = std::collections::BTreeMap::new();
    let mut bad_pattern = Vec::new();
    let mut leaky = Vec::new();
    let mut count = 0;
    for (family, max) in [(DarkFamily::Set1, 124), (DarkFamily::Set2, 126)] {
        for n in listed(family, max) {
            count += 1;
            let r = dark_scan(n, xi, ReservoirRule::Edges, ChainParams::default())?;
            if r.dark_states.len() != 1 {
                not_unique.insert(n, r.dark_states.len());
            }
            if !r.dark_states.iter().any(|d| matches_pattern(&d.amplitudes, family)) {
                bad_pattern.push(n);
            }
            if r.dark_states.iter().any(|d| d.max_reservoir_amplitude >= 1e-10) {
                leaky.push(n);
            }
        }
    }
    let pass = not_unique.is_empty() && bad_pattern.is_empty() && leaky.is_empty();
    let not_unique: Vec<String> = not_unique.iter().map(|(n, d)| format!("{n} ({d} dark)")).collect();
    Ok((
        pass,
        format!(
            "{count} listed chains with edge reservoir; not unique at N = [{}]; pattern mismatch at {:?}; boundary amplitude >= 1e-10 at {:?}",
            not_unique.join(", "),
            bad_pattern,
            leaky
        ),
    ))
}

/// Depth scaling of both families and the register near N = 128.
fn criterion5(exec: Execution) -> Result<(bool, String), CliError> {
    let xi = dark_resonance_xi(6);
    let params = ChainParams::default();
    let mut wrong = Vec::new();
    for (family, max) in [(DarkFamily::Set1, 124), (DarkFamily::Set2, 126)] {
        let ns = listed(family, max);
        for r in scaling_scan(&ns, xi, ReservoirRule::Nodes(family), params, exec)? {
            if r.n_dark != 1 || r.k != family.k(r.n_sites) || r.pattern_match != Some(family) {
                wrong.push(format!("{} N={} (k={})", family, r.n_sites, r.k));
            }
        }
    }
    let mut near = Vec::new();
    let mut hundred = Vec::new();
    for rule in [ReservoirRule::Edges, ReservoirRule::EveryZero] {
        for r in scaling_scan(&[124, 126, 128], xi, rule, params, exec)? {
            if r.n_dark == 1 {
                near.push(format!("{rule} N={}: k={} k_m={}", r.n_sites, r.k, r.k_m));
                if r.k_m == 100 {
                    hundred.push(format!("N={} {rule}", r.n_sites));
                }
            } else {
                near.push(format!("{rule} N={}: {} dark states", r.n_sites, r.n_dark));
            }
        }
    }
    let pass = wrong.is_empty() && !hundred.is_empty();
    Ok((
        pass,
        format!(
            "family depths k = 2+4m / 4+8m {}; k_m = 100 certified at [{}]; {}",
            if wrong.is_empty() { "all match".to_string() } else { format!("mismatch at {wrong:?}") },
            hundred.join(", "),
            near.join("; ")
        ),
    ))
}

/// Fitted Bloch decay against the adiabatic rate.
fn criterion6() -> Result<(bool, String), CliError> {
    let mut parts = Vec::new();
    let mut pass = true;
    for ratio in [1e-3, 1e-2, 1e-1] {
        let gamma_e = 1e4;
        let dc = DressingConfig::new(ratio * gamma_e, 0.0, gamma_e);
        let (t_final, dt) = bloch_window(&dc, 3.0);
        let s = integrate_bloch(&dc, t_final, dt)?;
        let fitted = fit_decay_rate(&s, t_final)?;
        let predicted = effective_decay_rate(&dc);
        let rel = (fitted - predicted).abs() / predicted;
        pass &= rel < 0.1;
        parts.push(format!("ratio {ratio:.0e}: fit {fitted:.4} vs {predicted:.4} ({:.2}%)", 100.0 * rel));
    }
    Ok((pass, parts.join("; ")))
}

/// Hopping forms, piecewise light shifts and the four-site block.
fn criterion7() -> Result<(bool, String), CliError> {
    let mut j_err: f64 = 0.0;
    for n in [4usize, 6, 10, 20] {
        for xi in [1.1, dark_resonance_xi(6), 1.25, 1.35] {
            for a0 in [0.22, 0.26, 0.3] {
                let sys = system(n, xi, a0)?;
                let scale = build_effective_model(&sys.lattice, &sys.drive, Truncation::Full)?.j_scale();
                for a in 0..n {
                    for b in (a + 1)..n {
                        let x = effective_j(&sys.lattice, &sys.drive, a, b)?;
                        let y = effective_j_f_form(&sys.lattice, &sys.drive, a, b)?;
                        j_err = j_err.max((x - y).abs() / scale.max(x.abs()));
                    }
                }
            }
        }
    }
    let mut ls_err: f64 = 0.0;
    for n in 4..=20 {
        let sys = system(n, dark_resonance_xi(6), 0.26)?;
        let m = build_effective_model(&sys.lattice, &sys.drive, Truncation::NextNearest)?;
        for i in 0..n {
            let pw = piecewise_light_shift(n, dark_resonance_xi(6), 6, m.j_scale(), i);
            ls_err = ls_err.max((pw - m.delta_ls[i]).abs() / m.j_scale());
        }
    }
    let (model, h) = chain_block(4, dark_resonance_xi(6), ChainParams::default(), Truncation::NextNearest)?;
    let expect = [[-1.0, 1.0, -1.0, 0.0], [1.0, 0.0, 1.0, -1.0], [-1.0, 1.0, 0.0, 1.0], [0.0, -1.0, 1.0, -1.0]];
    let mut block_err: f64 = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            block_err = block_err.max((h[(a, b)] / model.j_scale() - expect[a][b]).abs());
        }
    }
    let pass = j_err <= 1e-12 && ls_err <= 1e-12 && block_err <= 1e-12;
    Ok((
        pass,
        format!("J forms max relative difference {j_err:.1e}; piecewise light shift (N = 4..20) max error {ls_err:.1e} J; four-site block max error {block_err:.1e} J"),
    ))
}

fn physicality(checks: &[PhysicalityCheck]) -> (f64, f64, f64) {
    checks.iter().fold((0.0f64, 0.0f64, f64::INFINITY), |(t, h, m), c| (t.max(c.trace_error), h.max(c.hermiticity_defect), m.min(c.min_eigenvalue)))
}

/// Master-equation samples of criteria 1 to 3 and Liouvillian spectra for
/// N <= 4.
fn criterion8() -> Result<(bool, String), CliError> {
    let mut checks = Vec::new();
    // criterion 1 has no time series; its steady state is checked as a sample
    let p1 = EvolutionProblem::from_system(&system(4, dark_resonance_xi(6), 0.26)?, Tier::Effective, Truncation::Full, 1.0, 2)?;
    checks.push(PhysicalityCheck::of(f64::INFINITY, &steady_state(&p1)?.rho));
    checks.extend(fig2b_run()?.1.checks);
    checks.extend(fig3_run()?.1.checks);
    let (tr, herm, min_eig) = physicality(&checks);
    let samples_ok = tr < 1e-9 && herm < 1e-9 && min_eig > -1e-7;

    // the zero mode is exact (trace preservation) and removed analytically;
    // its raw Schur value is reported next to ε‖L‖
    let mut max_re = f64::NEG_INFINITY;
    let mut raw_zero = Vec::new();
    let mut failed = Vec::new();
    let cases = [(2, Tier::Effective), (3, Tier::Effective), (4, Tier::Effective), (2, Tier::Full), (3, Tier::Full), (4, Tier::Full)];
    for (n, tier) in cases {
        let p = EvolutionProblem::from_system(&system(n, dark_resonance_xi(6), 0.26)?, tier, Truncation::Full, 1.0, 2)?;
        match liouvillian_spectrum_deflated(&p) {
            Ok(s) => max_re = s.iter().map(|z| z.re).fold(max_re, f64::max),
            Err(_) => failed.push(format!("N={n} {tier:?}")),
        }
        if let Ok(s) = liouvillian_spectrum(&p) {
            let top = s.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
            let scale = f64::EPSILON * liouvillian_real(&p)?.norm();
            raw_zero.push(format!("N={n} {}: {top:.1e} (eps*|L| {scale:.0e})", if tier == Tier::Full { "full" } else { "effective" }));
        }
    }
    let spectrum_ok = max_re <= 1e-10 && failed.is_empty();
    Ok((
        samples_ok && spectrum_ok,
        format!(
            "{} samples: max |Tr-1| {tr:.1e}, max Hermiticity defect {herm:.1e}, min eigenvalue {min_eig:.1e}; Liouvillian N = 2..4 (both tiers) max Re beyond the steady mode {max_re:.1e}{}; raw steady-mode Re {}",
            checks.len(),
            if failed.is_empty() { String::new() } else { format!("; spectrum failed for {failed:?}") },
            raw_zero.join(", ")
        ),
    ))
}

fn random_single_excitation_mixture(rng: &mut ChaCha8Rng, n: usize, aligned: bool) -> QuantumState {
    let d = 1 << n;
    let rank = rng.random_range(1..=3);
    let mut rho = CMatrix::zeros(d, d);
    let mut total = 0.0;
    for _ in 0..rank {
        let w: f64 = rng.random_range(0.05..1.0);
        let mut v = CVector::zeros(d);
        v[0] = C64::new(rng.random_range(-1.0..1.0), if aligned { 0.0 } else { rng.random_range(-1.0..1.0) }) * rng.random_range(0.0..1.0);
        for i in 0..n {
            v[1 << i] = if aligned {
                C64::new(rng.random_range(0.0..1.0), 0.0)
            } else {
                C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            };
        }
        let v = &v / C64::new(v.norm(), 0.0);
        rho += &v * v.adjoint() * C64::new(w, 0.0);
        total += w;
    }
    QuantumState::mixed_unchecked(n, rho / C64::new(total, 0.0))
}

/// Ideal W point, projector completeness, Δ <= coherence form.
fn criterion9() -> Result<(bool, String), CliError> {
    let w = make_w_state(4, &[0, 1, 2, 3], None)?;
    let r = witness(&w, &WProjectorBasis::for_register(4)?)?;
    let w_ok = r.delta.abs() < 1e-12 && r.y_c.is_some_and(|y| y.abs() < 1e-12);

    let mut completeness: f64 = 0.0;
    for m in 1..=7 {
        let b = build_w_basis(m)?;
        for i in 0..b.n_m {
            for j in 0..b.n_m {
                let s: f64 = b.projectors.iter().map(|v| v[i] * v[j]).sum();
                completeness = completeness.max((s - if i == j { 1.0 } else { 0.0 }).abs());
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut violations = 0;
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let v = variance_bound(&random_single_excitation_mixture(&mut rng, 4, false))?;
        if !v.holds {
            violations += 1;
            worst = worst.max(v.delta - v.coherence_form);
        }
    }
    let mut aligned_violations = 0;
    for _ in 0..1000 {
        if !variance_bound(&random_single_excitation_mixture(&mut rng, 4, true))?.holds {
            aligned_violations += 1;
        }
    }
    let pass = w_ok && completeness < 1e-12 && violations == 0;
    Ok((
        pass,
        format!(
            "W state Delta = {:.1e}, y_c = {:.1e}; projector completeness error {completeness:.1e}; Delta > coherence form in {violations}/1000 random complex n<=1 states (largest excess {worst:.3}); {aligned_violations}/1000 with real non-negative coherences",
            r.delta,
            r.y_c.unwrap_or(f64::NAN)
        ),
    ))
}
