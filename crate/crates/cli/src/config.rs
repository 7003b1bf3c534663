//! Scenario configuration: TOML in, fully resolved [`ScenarioConfig`] out.
//!
//! Every violated constraint is reported with its field path; unknown keys
//! are rejected. Figure scenarios carry complete defaults, the generic ones
//! require the lattice and drive.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rydpump::darkstate::{dark_resonance_xi, ReservoirRule};
use rydpump::{DriveConfig, PhysicalSystem, Tier, Truncation};
use serde::{Deserialize, Serialize};
use toml::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Spectrum,
    Effective,
    Evolve,
    Trajectory,
    Steady,
    Witness,
    Darkscan,
    Scaling,
    Bloch,
    Fig2a,
    Fig2b,
    Fig3,
    Fig4,
}

impl Scenario {
    pub const ALL: [Scenario; 13] = [
        Self::Spectrum,
        Self::Effective,
        Self::Evolve,
        Self::Trajectory,
        Self::Steady,
        Self::Witness,
        Self::Darkscan,
        Self::Scaling,
        Self::Bloch,
        Self::Fig2a,
        Self::Fig2b,
        Self::Fig3,
        Self::Fig4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Spectrum => "spectrum",
            Self::Effective => "effective",
            Self::Evolve => "evolve",
            Self::Trajectory => "trajectory",
            Self::Steady => "steady",
            Self::Witness => "witness",
            Self::Darkscan => "darkscan",
            Self::Scaling => "scaling",
            Self::Bloch => "bloch",
            Self::Fig2a => "fig2a",
            Self::Fig2b => "fig2b",
            Self::Fig3 => "fig3",
            Self::Fig4 => "fig4",
        }
    }

    /// Scenarios that run without a lattice/drive section.
    fn has_defaults(self) -> bool {
        matches!(self, Self::Scaling | Self::Bloch | Self::Fig2a | Self::Fig2b | Self::Fig3 | Self::Fig4)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown scenario `{s}`"))
    }
}

/// One violated constraint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FieldError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            f.write_str(&self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeConfig {
    pub n_sites: usize,
    pub xi: f64,
    pub a0: f64,
    pub p: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriveSection {
    pub omega: f64,
    /// Γ/Γ_r.
    pub gamma_ratio: f64,
    /// Resolved δ (Δ_nn/2 unless given).
    pub delta: f64,
    pub reservoir_sites: Vec<usize>,
    pub gamma_reservoir: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicsConfig {
    pub tier: Tier,
    pub truncation: Truncation,
    pub t_final: f64,
    pub n_samples: usize,
    pub n_traj: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub n_list: Vec<usize>,
    pub xi: f64,
    pub rules: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub xi_min: f64,
    pub xi_max: f64,
    pub n_xi: usize,
    pub a0_min: f64,
    pub a0_max: f64,
    pub n_a0: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlochConfig {
    /// Ω_d/Γ_e values.
    pub ratios: Vec<f64>,
    pub delta_d: f64,
    /// Γ_e in units of Γ_r.
    pub gamma_e: f64,
    /// Integration length in units of the predicted lifetime.
    pub lifetimes: f64,
}

/// Fully resolved configuration; echoed by `validate` and hashed into the
/// manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub lattice: LatticeConfig,
    pub drive: DriveSection,
    pub dynamics: DynamicsConfig,
    /// Probed register A.
    pub register: Vec<usize>,
    pub scan: ScanConfig,
    pub grid: GridConfig,
    pub bloch: BlochConfig,
    pub output: PathBuf,
}

impl ScenarioConfig {
    pub fn system(&self) -> Result<PhysicalSystem, rydpump::hamiltonians::HamiltonianError> {
        self.system_at(self.lattice.xi, self.lattice.a0)
    }

    pub fn system_at(&self, xi: f64, a0: f64) -> Result<PhysicalSystem, rydpump::hamiltonians::HamiltonianError> {
        let d = &self.drive;
        let drive = DriveConfig {
            omega: d.omega,
            delta: None,
            gamma_r: 1.0 / d.gamma_ratio,
            gamma_reservoir: d.gamma_reservoir,
            reservoir_sites: d.reservoir_sites.clone(),
        };
        let mut sys = PhysicalSystem::with_drive(self.lattice.n_sites, xi, a0, self.lattice.p, drive)?;
        if (xi, a0) == (self.lattice.xi, self.lattice.a0) {
            sys.drive.delta = Some(d.delta);
        }
        Ok(sys)
    }

    pub fn rules(&self) -> Vec<ReservoirRule> {
        self.scan.rules.iter().filter_map(|r| r.parse().ok()).collect()
    }
}

const SCHEMA: &[(&str, &[&str])] = &[
    ("lattice", &["n_sites", "xi", "a0", "p"]),
    ("drive", &["omega", "gamma_ratio", "delta", "reservoir_sites", "gamma_reservoir"]),
    ("dynamics", &["tier", "truncation", "t_final", "n_samples", "n_traj", "seed"]),
    ("register", &["sites"]),
    ("scan", &["n_list", "xi", "rules"]),
    ("grid", &["xi_min", "xi_max", "n_xi", "a0_min", "a0_max", "n_a0"]),
    ("bloch", &["ratios", "delta_d", "gamma_e", "lifetimes"]),
    ("output", &["dir"]),
];

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub scenario: Option<Scenario>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub tier: Option<Tier>,
}

struct Reader<'a> {
    root: &'a toml::Table,
    errors: Vec<FieldError>,
}

impl<'a> Reader<'a> {
    fn get(&self, path: &str) -> Option<&'a Value> {
        let (table, key) = path.split_once('.').unwrap_or(("", path));
        if table.is_empty() {
            self.root.get(key)
        } else {
            self.root.get(table)?.as_table()?.get(key)
        }
    }

    fn err(&mut self, path: &str, message: impl Into<String>) {
        self.errors.push(FieldError { path: path.to_string(), message: message.into() });
    }

    fn float(&mut self, path: &str) -> Option<f64> {
        match self.get(path) {
            None => None,
            Some(Value::Float(x)) => Some(*x),
            Some(Value::Integer(x)) => Some(*x as f64),
            Some(_) => {
                self.err(path, "expected a number");
                None
            }
        }
    }

    fn uint(&mut self, path: &str) -> Option<u64> {
        match self.get(path) {
            None => None,
            Some(Value::Integer(x)) if *x >= 0 => Some(*x as u64),
            Some(_) => {
                self.err(path, "expected a non-negative integer");
                None
            }
        }
    }

    fn string(&mut self, path: &str) -> Option<String> {
        match self.get(path) {
            None => None,
            Some(Value::String(s)) => Some(s.clone()),
            Some(_) => {
                self.err(path, "expected a string");
                None
            }
        }
    }

    fn uint_list(&mut self, path: &str) -> Option<Vec<usize>> {
        let arr = match self.get(path) {
            None => return None,
            Some(Value::Array(a)) => a,
            Some(_) => {
                self.err(path, "expected an array of integers");
                return None;
            }
        };
        let mut out = Vec::with_capacity(arr.len());
        for (k, v) in arr.iter().enumerate() {
            match v {
                Value::Integer(x) if *x >= 0 => out.push(*x as usize),
                _ => {
                    self.err(&format!("{path}[{k}]"), "expected a non-negative integer");
                    return None;
                }
            }
        }
        Some(out)
    }

    fn float_list(&mut self, path: &str) -> Option<Vec<f64>> {
        let arr = match self.get(path) {
            None => return None,
            Some(Value::Array(a)) => a,
            Some(_) => {
                self.err(path, "expected an array of numbers");
                return None;
            }
        };
        let mut out = Vec::with_capacity(arr.len());
        for (k, v) in arr.iter().enumerate() {
            match v {
                Value::Float(x) => out.push(*x),
                Value::Integer(x) => out.push(*x as f64),
                _ => {
                    self.err(&format!("{path}[{k}]"), "expected a number");
                    return None;
                }
            }
        }
        Some(out)
    }

    fn string_list(&mut self, path: &str) -> Option<Vec<String>> {
        let arr = match self.get(path) {
            None => return None,
            Some(Value::Array(a)) => a,
            Some(_) => {
                self.err(path, "expected an array of strings");
                return None;
            }
        };
        let mut out = Vec::new();
        for (k, v) in arr.iter().enumerate() {
            match v {
                Value::String(s) => out.push(s.clone()),
                _ => {
                    self.err(&format!("{path}[{k}]"), "expected a string");
                    return None;
                }
            }
        }
        Some(out)
    }

    fn positive(&mut self, path: &str, v: f64) {
        if !(v > 0.0 && v.is_finite()) {
            self.err(path, format!("must be positive and finite, got {v}"));
        }
    }
}

struct Defaults {
    n_sites: usize,
    xi: f64,
    a0: f64,
    omega: f64,
    tier: Tier,
    t_final: f64,
    n_samples: usize,
    n_traj: usize,
}

fn scenario_defaults(s: Scenario) -> Option<Defaults> {
    let xi1 = dark_resonance_xi(6);
    let four = Defaults { n_sites: 4, xi: xi1, a0: 0.26, omega: 1e3, tier: Tier::Effective, t_final: 200.0, n_samples: 401, n_traj: 0 };
    match s {
        Scenario::Fig2a => Some(Defaults { tier: Tier::Full, ..four }),
        Scenario::Fig2b => Some(four),
        Scenario::Fig3 => Some(Defaults { n_sites: 6, xi: 1.1996, a0: 0.285, t_final: 300.0, n_samples: 601, n_traj: 1000, ..four }),
        Scenario::Scaling | Scenario::Fig4 | Scenario::Bloch => Some(four),
        _ => None,
    }
}

/// Parse and resolve a configuration document.
pub fn parse_config(text: &str, overrides: &Overrides) -> Result<ScenarioConfig, Vec<FieldError>> {
    let root: toml::Table = text.parse().map_err(|e: toml::de::Error| vec![FieldError { path: String::new(), message: format!("invalid TOML: {}", e.message()) }])?;
    let mut r = Reader { root: &root, errors: Vec::new() };

    for (key, value) in root.iter() {
        if key == "scenario" {
            continue;
        }
        match SCHEMA.iter().find(|(t, _)| t == key) {
            None => r.err(key, "unknown key"),
            Some((_, fields)) => match value.as_table() {
                None => r.err(key, "expected a table"),
                Some(t) => {
                    for k in t.keys().filter(|k| !fields.contains(&k.as_str())) {
                        r.err(&format!("{key}.{k}"), "unknown key");
                    }
                }
            },
        }
    }

    let from_file = r.string("scenario");
    let scenario = match (overrides.scenario, from_file) {
        (Some(s), Some(f)) if s.name() != f => {
            r.err("scenario", format!("file says `{f}` but `{s}` was requested"));
            s
        }
        (Some(s), _) => s,
        (None, Some(f)) => match f.parse() {
            Ok(s) => s,
            Err(e) => {
                r.err("scenario", e);
                return Err(r.errors);
            }
        },
        (None, None) => {
            r.err("scenario", "missing");
            return Err(r.errors);
        }
    };
    let defaults = scenario_defaults(scenario);

    let required = |r: &mut Reader, path: &str, v: Option<f64>, d: Option<f64>| -> f64 {
        match v.or(d) {
            Some(x) => x,
            None => {
                r.err(path, "missing");
                f64::NAN
            }
        }
    };

    let n_sites = match r.uint("lattice.n_sites").map(|x| x as usize).or(defaults.as_ref().map(|d| d.n_sites)) {
        Some(n) => n,
        None => {
            r.err("lattice.n_sites", "missing");
            0
        }
    };
    let xi_in = r.float("lattice.xi");
    let xi = required(&mut r, "lattice.xi", xi_in, defaults.as_ref().map(|d| d.xi));
    let needs_chain = !matches!(scenario, Scenario::Darkscan);
    let a0_in = r.float("lattice.a0");
    let a0 = if needs_chain { required(&mut r, "lattice.a0", a0_in, defaults.as_ref().map(|d| d.a0)) } else { a0_in.unwrap_or(0.26) };
    let p = r.uint("lattice.p").unwrap_or(6) as u32;
    let omega_in = r.float("drive.omega");
    let omega = if needs_chain { required(&mut r, "drive.omega", omega_in, defaults.as_ref().map(|d| d.omega)) } else { omega_in.unwrap_or(1e3) };
    let gamma_ratio = r.float("drive.gamma_ratio").unwrap_or(1e4);
    let gamma_reservoir = r.float("drive.gamma_reservoir").unwrap_or(1.0);
    let delta_in = r.float("drive.delta");
    let reservoir_sites = r.uint_list("drive.reservoir_sites").unwrap_or_else(|| if n_sites >= 2 { vec![0, n_sites - 1] } else { vec![0] });
    if !omega.is_nan() {
        r.positive("drive.omega", omega);
    }
    r.positive("drive.gamma_ratio", gamma_ratio);
    if !(gamma_reservoir >= 0.0 && gamma_reservoir.is_finite()) {
        r.err("drive.gamma_reservoir", "must be non-negative and finite");
    }
    if let Some(&bad) = reservoir_sites.iter().find(|&&s| s >= n_sites) {
        r.err("drive.reservoir_sites", format!("site {bad} out of range for {n_sites} sites"));
    }

    let tier = match (overrides.tier, r.string("dynamics.tier")) {
        (Some(t), _) => t,
        (None, Some(s)) => match s.as_str() {
            "full" => Tier::Full,
            "effective" => Tier::Effective,
            _ => {
                r.err("dynamics.tier", format!("expected `full` or `effective`, got `{s}`"));
                Tier::Effective
            }
        },
        (None, None) => defaults.as_ref().map(|d| d.tier).unwrap_or(Tier::Effective),
    };
    let truncation = match r.string("dynamics.truncation").as_deref() {
        None | Some("full") => Truncation::Full,
        Some("next_nearest") => Truncation::NextNearest,
        Some(other) => {
            r.err("dynamics.truncation", format!("expected `full` or `next_nearest`, got `{other}`"));
            Truncation::Full
        }
    };
    let needs_time = matches!(scenario, Scenario::Evolve | Scenario::Trajectory);
    let t_in = r.float("dynamics.t_final");
    let t_final = if needs_time { required(&mut r, "dynamics.t_final", t_in, defaults.as_ref().map(|d| d.t_final)) } else { t_in.or(defaults.as_ref().map(|d| d.t_final)).unwrap_or(100.0) };
    if !t_final.is_nan() {
        r.positive("dynamics.t_final", t_final);
    }
    let n_samples = r.uint("dynamics.n_samples").map(|x| x as usize).or(defaults.as_ref().map(|d| d.n_samples)).unwrap_or(101);
    if n_samples < 2 {
        r.err("dynamics.n_samples", "need at least 2 samples");
    }
    let n_traj = r.uint("dynamics.n_traj").map(|x| x as usize).or(defaults.as_ref().map(|d| d.n_traj).filter(|&n| n > 0)).unwrap_or(500);
    if matches!(scenario, Scenario::Trajectory | Scenario::Fig3) && n_traj == 0 {
        r.err("dynamics.n_traj", "must be at least 1");
    }
    let seed = overrides.seed.or(r.uint("dynamics.seed")).unwrap_or(0);

    let register = r.uint_list("register.sites").unwrap_or_else(|| if n_sites > 2 { (1..n_sites - 1).collect() } else { (0..n_sites).collect() });
    if let Some(&bad) = register.iter().find(|&&s| s >= n_sites) {
        r.err("register.sites", format!("site {bad} out of range for {n_sites} sites"));
    }
    if register.is_empty() {
        r.err("register.sites", "must not be empty");
    }

    let default_n_list: Vec<usize> = match scenario {
        Scenario::Fig4 => (4..=128).collect(),
        _ => (4..=40).collect(),
    };
    let n_list = r.uint_list("scan.n_list").unwrap_or(default_n_list);
    if let Some(&bad) = n_list.iter().find(|&&n| n < 2) {
        r.err("scan.n_list", format!("chains need at least 2 sites, got {bad}"));
    }
    let scan_xi = r.float("scan.xi").unwrap_or(dark_resonance_xi(p.max(1)));
    let rules = r.string_list("scan.rules").unwrap_or_else(|| vec!["edges".into(), "every_zero".into()]);
    for (k, rule) in rules.iter().enumerate() {
        if let Err(e) = rule.parse::<ReservoirRule>() {
            r.err(&format!("scan.rules[{k}]"), e);
        }
    }

    // centred on the dark resonance so the optimum is a grid point
    let xi_dark = dark_resonance_xi(6);
    let grid = GridConfig {
        xi_min: r.float("grid.xi_min").unwrap_or(xi_dark - 0.1),
        xi_max: r.float("grid.xi_max").unwrap_or(xi_dark + 0.1),
        n_xi: r.uint("grid.n_xi").unwrap_or(41) as usize,
        a0_min: r.float("grid.a0_min").unwrap_or(0.20),
        a0_max: r.float("grid.a0_max").unwrap_or(0.34),
        n_a0: r.uint("grid.n_a0").unwrap_or(29) as usize,
    };
    if grid.n_xi == 0 || grid.n_a0 == 0 {
        r.err("grid", "grid needs at least one point per axis");
    }

    let bloch = BlochConfig {
        ratios: r.float_list("bloch.ratios").unwrap_or_else(|| vec![1e-3, 1e-2, 1e-1]),
        delta_d: r.float("bloch.delta_d").unwrap_or(0.0),
        gamma_e: r.float("bloch.gamma_e").unwrap_or(1e4),
        lifetimes: r.float("bloch.lifetimes").unwrap_or(3.0),
    };
    r.positive("bloch.gamma_e", bloch.gamma_e);
    r.positive("bloch.lifetimes", bloch.lifetimes);

    let output = overrides
        .out
        .clone()
        .or_else(|| r.string("output.dir").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(format!("out/{}", scenario.name())));

    if !r.errors.is_empty() {
        return Err(r.errors);
    }

    let mut cfg = ScenarioConfig {
        scenario,
        lattice: LatticeConfig { n_sites, xi, a0, p },
        drive: DriveSection { omega, gamma_ratio, delta: f64::NAN, reservoir_sites, gamma_reservoir },
        dynamics: DynamicsConfig { tier, truncation, t_final, n_samples, n_traj, seed },
        register,
        scan: ScanConfig { n_list, xi: scan_xi, rules },
        grid,
        bloch,
        output,
    };

    // geometry and drive checks from the library, reported against the
    // section they come from
    if needs_chain || scenario.has_defaults() {
        let probe = DriveConfig {
            omega,
            delta: delta_in,
            gamma_r: 1.0 / gamma_ratio,
            gamma_reservoir,
            reservoir_sites: cfg.drive.reservoir_sites.clone(),
        };
        match PhysicalSystem::with_drive(n_sites, xi, a0, p, probe) {
            Ok(sys) => cfg.drive.delta = sys.delta(),
            Err(e) => {
                let section = match e {
                    rydpump::hamiltonians::HamiltonianError::Lattice(_) => "lattice",
                    _ => "drive",
                };
                return Err(vec![FieldError { path: section.into(), message: e.to_string() }]);
            }
        }
    }
    Ok(cfg)
}

/// Configuration for a scenario run without a file.
pub fn default_config(overrides: &Overrides) -> Result<ScenarioConfig, Vec<FieldError>> {
    let text = match overrides.scenario {
        Some(s) => format!("scenario = \"{}\"\n", s.name()),
        None => String::new(),
    };
    parse_config(&text, overrides)
}

pub fn load_config(path: &Path, overrides: &Overrides) -> Result<ScenarioConfig, Vec<FieldError>> {
    let text = std::fs::read_to_string(path).map_err(|e| vec![FieldError { path: String::new(), message: format!("cannot read {}: {e}", path.display()) }])?;
    parse_config(&text, overrides)
}
