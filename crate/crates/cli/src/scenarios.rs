//! One function per scenario. Each writes its tables into the output
//! directory; column sets are listed in the README.

use rydpump::darkstate::{dark_scan, scaling_scan, truncation_error_report, ChainParams, DarkFamily};
use rydpump::dissipation::{effective_decay_rate, fit_decay_rate, integrate_bloch, DressingConfig};
use rydpump::dynamics::{evolve_master, evolve_trajectories, liouvillian_singular_values, steady_state, steady_state_unchecked, SteadyState};
use rydpump::entanglement::{bound_delta_for, boundary_table, witness, WProjectorBasis};
use rydpump::hamiltonians::{build_effective_model, rydberg_spectrum};
use rydpump::lattice::{build_positions, pair_shift};
use rydpump::linalg::trace_distance;
use rydpump::{EvolutionProblem, Execution, QuantumState, Tier};
use serde::Serialize;

use crate::analysis::{crossing_times, observables_table, Observables, RegisterProbe};
use crate::config::{Scenario, ScenarioConfig};
use crate::output::{OutputDir, Table};
use crate::{row, CliError};

pub fn run(cfg: &ScenarioConfig, exec: Execution, out: &mut OutputDir) -> Result<(), CliError> {
    match cfg.scenario {
        Scenario::Spectrum => spectrum(cfg, out),
        Scenario::Effective => effective(cfg, out),
        Scenario::Evolve => evolve(cfg, out),
        Scenario::Trajectory => trajectory(cfg, exec, out),
        Scenario::Steady => steady(cfg, out),
        Scenario::Witness => witness_scenario(cfg, out),
        Scenario::Darkscan => darkscan(cfg, out),
        Scenario::Scaling | Scenario::Fig4 => scaling(cfg, exec, out),
        Scenario::Bloch => bloch(cfg, out),
        Scenario::Fig2a => fig2a(cfg, exec, out),
        Scenario::Fig2b => fig2b(cfg, out),
        Scenario::Fig3 => fig3(cfg, exec, out),
    }
}

fn problem(cfg: &ScenarioConfig) -> Result<EvolutionProblem, CliError> {
    let sys = cfg.system()?;
    let d = &cfg.dynamics;
    Ok(EvolutionProblem::from_system(&sys, d.tier, d.truncation, d.t_final, d.n_samples)?)
}

fn master_series(p: &EvolutionProblem, probe: &RegisterProbe, out: &mut OutputDir, prefix: &str) -> Result<Vec<Observables>, CliError> {
    let sol = evolve_master(p, &p.ground_density())?;
    let obs = sol
        .times
        .iter()
        .zip(&sol.states)
        .map(|(&t, rho)| probe.observe(&p.basis, rho, t))
        .collect::<rydpump::Result<Vec<_>>>()?;
    out.write_table(&format!("{prefix}.csv"), &observables_table(&obs))?;
    let mut checks = Table::new(&["t", "trace_error", "hermiticity_defect", "min_eigenvalue"]);
    for c in &sol.checks {
        checks.push(row![c.t, c.trace_error, c.hermiticity_defect, c.min_eigenvalue]);
    }
    out.write_table(&format!("{prefix}_checks.csv"), &checks)?;
    Ok(obs)
}

#[derive(Serialize)]
struct SteadySummary {
    tier: Tier,
    n_sites: usize,
    register: Vec<usize>,
    fidelity: f64,
    concurrence: Option<f64>,
    delta: f64,
    y_c: Option<f64>,
    k_min: usize,
    p0: f64,
    p1: f64,
    p_ge2: f64,
    singular_gap: Option<f64>,
    max_real_part: Option<f64>,
}

fn steady_summary(cfg: &ScenarioConfig, ss: &SteadyState, o: &Observables) -> SteadySummary {
    SteadySummary {
        tier: cfg.dynamics.tier,
        n_sites: cfg.lattice.n_sites,
        register: cfg.register.clone(),
        fidelity: o.fidelity,
        concurrence: (!o.concurrence.is_nan()).then_some(o.concurrence),
        delta: o.delta,
        y_c: o.y_c,
        k_min: o.k_min,
        p0: o.p0,
        p1: o.p1,
        p_ge2: o.p_ge2,
        singular_gap: ss.gap,
        max_real_part: ss.max_real_part,
    }
}

fn spectrum(cfg: &ScenarioConfig, out: &mut OutputDir) -> Result<(), CliError> {
    let sys = cfg.system()?;
    let s = rydberg_spectrum(&sys.lattice, Some(&sys.drive))?;
    let n = cfg.lattice.n_sites;
    let mut t = Table::new(&["n", "v_n", "anharmonicity", "two_photon_detuning", "two_photon_linewidth", "blockaded"]);
    for k in 0..=n {
        let get = |v: &Vec<f64>| v.get(k).copied().unwrap_or(f64::NAN);
        let blockaded = s.blockaded.get(k).map(|b| b.to_string()).unwrap_or_default();
        t.push(row![k, s.v[k], get(&s.anharmonicity), get(&s.two_photon_detuning), get(&s.two_photon_linewidth), blockaded]);
    }
    out.write_table("spectrum.csv", &t)?;

    let pos = build_positions(&sys.lattice)?;
    let mut pairs = Table::new(&["i", "j", "x_i", "y_i", "x_j", "y_j", "shift"]);
    for i in 0..n {
        for j in (i + 1)..n {
            let shift = pair_shift(&sys.lattice, i, j)?;
            pairs.push(row![i, j, pos[i][0], pos[i][1], pos[j][0], pos[j][1], shift]);
        }
    }
    out.write_table("pair_shifts.csv", &pairs)?;
    Ok(())
}

fn effective(cfg: &ScenarioConfig, out: &mut OutputDir) -> Result<(), CliError> {
    let sys = cfg.system()?;
    let m = build_effective_model(&sys.lattice, &sys.drive, cfg.dynamics.truncation)?;
    let j = m.j_scale();
    let mut t = Table::new(&["i", "j", "j_ij", "j_ij_over_j"]);
    for a in 0..m.n_sites {
        for b in (a + 1)..m.n_sites {
            t.push(row![a, b, m.j[a][b], m.j[a][b] / j]);
        }
    }
    out.write_table("couplings.csv", &t)?;
    let mut ls = Table::new(&["i", "light_shift", "light_shift_over_j"]);
    for (i, &x) in m.delta_ls.iter().enumerate() {
        ls.push(row![i, x, x / j]);
    }
    out.write_table("light_shifts.csv", &ls)?;
    if cfg.lattice.n_sites >= 3 {
        let report = truncation_error_report(&sys.lattice, &sys.drive)?;
        out.write_json("truncation.json", &report)?;
    }
    Ok(())
}

fn evolve(cfg: &ScenarioConfig, out: &mut OutputDir) -> Result<(), CliError> {
    let p = problem(cfg)?;
    let probe = RegisterProbe::new(&cfg.register)?;
    master_series(&p, &probe, out, "master")?;
    Ok(())
}

#[derive(Serialize)]
struct TrajectorySummary {
    n_traj: usize,
    completed: usize,
    seed: u64,
    mean_jumps: f64,
    failures: Vec<String>,
}

fn trajectory_series(cfg: &ScenarioConfig, p: &EvolutionProblem, probe: &RegisterProbe, exec: Execution, out: &mut OutputDir, prefix: &str) -> Result<(Vec<Observables>, Vec<rydpump::CMatrix>), CliError> {
    let psi0 = QuantumState::ground(cfg.lattice.n_sites)?;
    let ens = evolve_trajectories(p, &psi0, cfg.dynamics.n_traj, cfg.dynamics.seed, exec)?;
    let obs = ens
        .times
        .iter()
        .zip(&ens.mean_rho)
        .map(|(&t, rho)| probe.observe(&p.basis, rho, t))
        .collect::<rydpump::Result<Vec<_>>>()?;
    out.write_table(&format!("{prefix}.csv"), &observables_table(&obs))?;
    let mut jumps = Table::new(&["trajectory", "jumps"]);
    for (i, j) in ens.indices.iter().zip(&ens.jump_counts) {
        jumps.push(row![*i, *j]);
    }
    out.write_table(&format!("{prefix}_jumps.csv"), &jumps)?;
    let completed = ens.indices.len();
    let summary = TrajectorySummary {
        n_traj: ens.n_traj,
        completed,
        seed: ens.seed,
        mean_jumps: ens.jump_counts.iter().sum::<usize>() as f64 / completed.max(1) as f64,
        failures: ens.failures.iter().map(|f| format!("trajectory {} at t = {}: {}", f.index, f.t, f.reason)).collect(),
    };
    out.write_json(&format!("{prefix}_summary.json"), &summary)?;
    Ok((obs, ens.mean_rho))
}

fn trajectory(cfg: &ScenarioConfig, exec: Execution, out: &mut OutputDir) -> Result<(), CliError> {
    let p = problem(cfg)?;
    let probe = RegisterProbe::new(&cfg.register)?;
    trajectory_series(cfg, &p, &probe, exec, out, "trajectories")?;
    Ok(())
}

fn steady(cfg: &ScenarioConfig, out: &mut OutputDir) -> Result<(), CliError> {
    let p = problem(cfg)?;
    let ss = steady_state(&p)?;
    let probe = RegisterProbe::new(&cfg.register)?;
    let o = probe.observe(&p.basis, &ss.rho, f64::INFINITY)?;
    out.write_json("steady.json", &steady_summary(cfg, &ss, &o))?;
    let full = QuantumState::from_basis_density(&p.basis, &ss.rho)?;
    out.write_json("steady_state.json", &full.to_document())?;
    Ok(())
}

fn boundary_csv(n_a: usize, y_c: f64) -> Result<Table, CliError> {
    let basis = WProjectorBasis::for_register(n_a)?;
    let zero = boundary_table(basis.n_m, n_a, 0.0)?;
    let at = boundary_table(basis.n_m, n_a, y_c)?;
    let mut t = Table::new(&["k_minus_1", "bound_y0", "bound_at_y_c", "ambiguous"]);
    for (a, b) in zero.iter().zip(&at) {
        t.push(row![a.k_minus_1, a.bound, b.bound, b.ambiguous]);
    }
    Ok(t)
}

fn witness_scenario(cfg: &ScenarioConfig, out: &mut OutputDir) -> Result<(), CliError> {
    let p = problem(cfg)?;
    let ss = steady_state(&p)?;
    let full = QuantumState::from_basis_density(&p.basis, &ss.rho)?;
    let reduced = full.partial_trace(&cfg.register)?;
    let basis = WProjectorBasis::for_register(cfg.register.len())?;
    let report = witness(&reduced, &basis)?;
    out.write_json("witness.json", &report)?;
    out.write_table("boundary.csv", &boundary_csv(cfg.register.len(), report.y_c.unwrap_or(0.0))?)?;
    Ok(())
}

fn chain_params(cfg: &ScenarioConfig) -> ChainParams {
    ChainParams { a0: cfg.lattice.a0, omega: cfg.drive.omega, gamma_ratio: cfg.drive.gamma_ratio }
}

fn darkscan(cfg: &ScenarioConfig, out: &mut OutputDir) -> Result<(), CliError> {
    let n = cfg.lattice.n_sites;
    let mut eig = Table::new(&["rule", "index", "energy", "dark"]);
    let mut states = Table::new(&["rule", "state", "site", "amplitude"]);
    let mut summary = Table::new(&["rule", "reservoir", "n_dark", "pattern_match", "residual"]);
    for rule in cfg.rules() {
        let r = dark_scan(n, cfg.lattice.xi, rule, chain_params(cfg))?;
        for (i, e) in r.eigenvalues.iter().enumerate() {
            eig.push(row![rule.to_string(), i, *e, r.dark_indices.contains(&i)]);
        }
        for (s, d) in r.dark_states.iter().enumerate() {
            for (site, a) in d.amplitudes.iter().enumerate() {
                states.push(row![rule.to_string(), s, site, *a]);
            }
        }
        let reservoir: Vec<String> = r.reservoir.iter().map(|s| s.to_string()).collect();
        let pattern = r.pattern_match.map(|f| f.to_string()).unwrap_or_default();
        summary.push(row![rule.to_string(), reservoir.join(" "), r.dark_states.len(), pattern, r.residual]);
    }
    out.write_table("darkscan_eigenvalues.csv", &eig)?;
    out.write_table("darkscan_states.csv", &states)?;
    out.write_table("darkscan_summary.csv", &summary)?;
    Ok(())
}

fn scaling(cfg: &ScenarioConfig, exec: Execution, out: &mut OutputDir) -> Result<(), CliError> {
    let mut t = Table::new(&["rule", "n_sites", "xi", "n_dark", "k", "delta", "delta_signed", "k_m", "k_m_signed", "pattern_match", "listed"]);
    for rule in cfg.rules() {
        let rows = scaling_scan(&cfg.scan.n_list, cfg.scan.xi, rule, chain_params(cfg), exec)?;
        for r in rows {
            let listed = [DarkFamily::Set1, DarkFamily::Set2].iter().any(|f| f.listed(r.n_sites));
            let pattern = r.pattern_match.map(|f| f.to_string()).unwrap_or_default();
            t.push(row![rule.to_string(), r.n_sites, r.xi, r.n_dark, r.k, r.delta, r.delta_signed, r.k_m, r.k_m_signed, pattern, listed]);
        }
    }
    let name = if cfg.scenario == Scenario::Fig4 { "fig4.csv" } else { "scaling.csv" };
    out.write_table(name, &t)?;
    if cfg.scenario == Scenario::Fig4 {
        // dashed Δ_b tiers: y_c = 0 bounds for the largest register
        let n_m = cfg.scan.n_list.iter().map(|&n| n.next_power_of_two()).max().unwrap_or(2);
        let z = rydpump::entanglement::zero_bounds(n_m);
        let mut b = Table::new(&["n_m", "k_minus_1", "bound"]);
        for (k, &x) in z.iter().enumerate() {
            b.push(row![n_m, k, x]);
        }
        out.write_table("fig4_bounds.csv", &b)?;
    }
    Ok(())
}

/// Integration setup for one Bloch run: (t_final, dt).
pub fn bloch_window(dc: &DressingConfig, lifetimes: f64) -> (f64, f64) {
    let rate = effective_decay_rate(dc);
    let fastest = (dc.gamma_e / 2.0).max(dc.omega_d).max(dc.delta_d.abs()).max(dc.gamma_r / 2.0);
    (lifetimes / rate, 0.05 / fastest)
}

fn bloch(cfg: &ScenarioConfig, out: &mut OutputDir) -> Result<(), CliError> {
    let b = &cfg.bloch;
    let mut t = Table::new(&["ratio", "omega_d", "predicted_rate", "fitted_rate", "relative_error"]);
    let mut series = Table::new(&["ratio", "t", "population"]);
    for &ratio in &b.ratios {
        let dc = DressingConfig::new(ratio * b.gamma_e, b.delta_d, b.gamma_e);
        let (t_final, dt) = bloch_window(&dc, b.lifetimes);
        let s = integrate_bloch(&dc, t_final, dt)?;
        let fitted = fit_decay_rate(&s, t_final)?;
        let predicted = effective_decay_rate(&dc);
        t.push(row![ratio, dc.omega_d, predicted, fitted, (fitted - predicted) / predicted]);
        let stride = (s.t.len() / 200).max(1);
        for (k, pop) in s.population().iter().enumerate().step_by(stride) {
            series.push(row![ratio, s.t[k], *pop]);
        }
    }
    out.write_table("bloch.csv", &t)?;
    out.write_table("bloch_series.csv", &series)?;
    Ok(())
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

fn fig2a(cfg: &ScenarioConfig, exec: Execution, out: &mut OutputDir) -> Result<(), CliError> {
    let g = &cfg.grid;
    let xs = linspace(g.xi_min, g.xi_max, g.n_xi);
    let as_ = linspace(g.a0_min, g.a0_max, g.n_a0);
    let probe = RegisterProbe::new(&cfg.register)?;
    let points: Vec<(f64, f64)> = xs.iter().flat_map(|&x| as_.iter().map(move |&a| (x, a))).collect();
    let results = exec.map(points.len(), |k| -> Result<Option<Observables>, CliError> {
        let (xi, a0) = points[k];
        // points outside the allowed geometry are left blank
        let Ok(sys) = cfg.system_at(xi, a0) else { return Ok(None) };
        let p = EvolutionProblem::from_system(&sys, cfg.dynamics.tier, cfg.dynamics.truncation, 1.0, 2)?;
        let ss = steady_state_unchecked(&p)?;
        Ok(Some(probe.observe(&p.basis, &ss.rho, f64::INFINITY)?))
    });
    let mut t = Table::new(&["xi", "a0", "fidelity", "p1", "delta", "k_min"]);
    for ((xi, a0), r) in points.iter().zip(results) {
        match r? {
            Some(o) => t.push(row![*xi, *a0, o.fidelity, o.p1, o.delta, o.k_min]),
            None => t.push(row![*xi, *a0, f64::NAN, f64::NAN, f64::NAN, 0usize]),
        }
    }
    out.write_table("fig2a.csv", &t)?;
    Ok(())
}

fn fig2b(cfg: &ScenarioConfig, out: &mut OutputDir) -> Result<(), CliError> {
    let p = problem(cfg)?;
    let probe = RegisterProbe::new(&cfg.register)?;
    master_series(&p, &probe, out, "fig2b")?;
    let ss = steady_state(&p)?;
    let o = probe.observe(&p.basis, &ss.rho, f64::INFINITY)?;
    out.write_json("fig2b_steady.json", &steady_summary(cfg, &ss, &o))?;
    Ok(())
}

#[derive(Serialize)]
pub struct Fig3Summary {
    pub crossing_times_master: Vec<Option<f64>>,
    pub crossing_times_trajectories: Vec<Option<f64>>,
    pub max_trace_distance: f64,
    pub steady: SteadyDigest,
}

#[derive(Serialize)]
pub struct SteadyDigest {
    pub fidelity: f64,
    pub delta: f64,
    pub y_c: Option<f64>,
    pub k_min: usize,
}

fn fig3(cfg: &ScenarioConfig, exec: Execution, out: &mut OutputDir) -> Result<(), CliError> {
    let p = problem(cfg)?;
    let probe = RegisterProbe::new(&cfg.register)?;
    let master = evolve_master(&p, &p.ground_density())?;
    let obs = master
        .times
        .iter()
        .zip(&master.states)
        .map(|(&t, rho)| probe.observe(&p.basis, rho, t))
        .collect::<rydpump::Result<Vec<_>>>()?;
    out.write_table("fig3_master.csv", &observables_table(&obs))?;
    let (traj, mean_rho) = trajectory_series(cfg, &p, &probe, exec, out, "fig3_trajectories")?;
    let max_td = master.states.iter().zip(&mean_rho).map(|(a, b)| trace_distance(a, b)).fold(0.0, f64::max);

    // boundary curves for the witness plane
    let n_a = probe.n_a();
    let n_m = WProjectorBasis::for_register(n_a)?.n_m;
    let mut header: Vec<&'static str> = vec!["y_c"];
    let names = ["bound_1", "bound_2", "bound_3", "bound_4", "bound_5", "bound_6", "bound_7"];
    header.extend(names.iter().take(n_a.saturating_sub(1).min(names.len())));
    let mut curves = Table::new(&header);
    for k in 0..=120 {
        let y = 10f64.powf(-6.0 + 6.0 * k as f64 / 120.0);
        let mut r = row![y];
        for j in 1..header.len() {
            r.push(bound_delta_for(j, n_m, n_a, y)?.into());
        }
        curves.push(r);
    }
    out.write_table("fig3_boundaries.csv", &curves)?;

    let ss = steady_state(&p)?;
    let so = probe.observe(&p.basis, &ss.rho, f64::INFINITY)?;
    let summary = Fig3Summary {
        crossing_times_master: crossing_times(&obs, n_a),
        crossing_times_trajectories: crossing_times(&traj, n_a),
        max_trace_distance: max_td,
        steady: SteadyDigest { fidelity: so.fidelity, delta: so.delta, y_c: so.y_c, k_min: so.k_min },
    };
    out.write_json("fig3_summary.json", &summary)?;
    let sv = liouvillian_singular_values(&p)?;
    let mut svt = Table::new(&["index", "singular_value"]);
    for (i, s) in sv.iter().take(8).enumerate() {
        svt.push(row![i, *s]);
    }
    out.write_table("fig3_liouvillian_gap.csv", &svt)?;
    Ok(())
}
