//! Dark eigenstates of the single-excitation block.
//!
//! At the dark resonance ξ^p = 3 the nearest and next-nearest hoppings cancel
//! and the truncated block has eigenvectors with nodes on every third
//! (pattern 1: 0,+,+,0,−,−,0,…) or every fifth (pattern 2: 0,+,+,+,+,0,−,…)
//! site. A pattern fits a chain of N sites when its last site is a node:
//! N = 4 + 3m and N = 6 + 5m respectively; the even members of each family
//! end on a positive block.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::entanglement::{witness_from_parts, EntanglementError, WProjectorBasis};
use crate::exec::Execution;
use crate::hamiltonians::{build_effective_model, DriveConfig, EffectiveModel, HamiltonianError, PhysicalSystem, Truncation};
use crate::lattice::LatticeSpec;
use crate::linalg::eigh_real;
use crate::states::ExcitationStats;
use crate::{CMatrix, C64};

/// Default reservoir amplitude threshold.
pub const DARK_THRESHOLD: f64 = 1e-10;

/// Amplitudes below this (relative to the largest) count as nodes.
const NODE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DarkStateError {
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
    #[error(transparent)]
    Entanglement(#[from] EntanglementError),
    #[error("reservoir set is empty")]
    EmptyReservoir,
    #[error("reservoir site {index} out of range for {n_sites} sites")]
    ReservoirOutOfRange { index: usize, n_sites: usize },
    #[error("matrix must be square and symmetric")]
    NotSymmetric,
}

/// ξ at which J_{i,i+1} = −J_{i,i+2} for δ = Δ_nn/2.
pub fn dark_resonance_xi(p: u32) -> f64 {
    3f64.powf(1.0 / p as f64)
}

/// Node patterns of the two dark families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DarkFamily {
    /// Period 3, nodes at i ≡ 0 (mod 3).
    Set1,
    /// Period 5, nodes at i ≡ 0 (mod 5).
    Set2,
}

impl DarkFamily {
    fn period(self) -> usize {
        match self {
            Self::Set1 => 3,
            Self::Set2 => 5,
        }
    }

    /// Whether the pattern closes on a node at site N−1.
    pub fn fits(self, n_sites: usize) -> bool {
        n_sites > self.period() && (n_sites - 1) % self.period() == 0
    }

    /// Whether N belongs to the family as originally listed (every other
    /// member of the fitting chains: N = 4+6m, N = 6+10m).
    pub fn listed(self, n_sites: usize) -> bool {
        self.fits(n_sites) && ((n_sites - 1) / self.period()) % 2 == 1
    }

    /// Sign pattern on N sites (0 at nodes, ±1 elsewhere).
    pub fn pattern(self, n_sites: usize) -> Vec<f64> {
        let p = self.period();
        (0..n_sites)
            .map(|i| {
                if i % p == 0 {
                    0.0
                } else if (i / p) % 2 == 0 {
                    1.0
                } else {
                    -1.0
                }
            })
            .collect()
    }

    /// Non-zero amplitude count for a fitting chain.
    pub fn k(self, n_sites: usize) -> usize {
        (n_sites - 1) / self.period() * (self.period() - 1)
    }
}

/// Families that fit N, the longer-period one first.
pub fn families_for(n_sites: usize) -> Vec<DarkFamily> {
    [DarkFamily::Set2, DarkFamily::Set1].into_iter().filter(|f| f.fits(n_sites)).collect()
}

/// Which sites carry the enhanced decay.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReservoirRule {
    /// The two chain ends.
    Edges,
    /// Every node of the fitting pattern (set 2 preferred); chains that fit
    /// no pattern get no reservoir and are reported as absent.
    EveryZero,
    /// Every node of one family's pattern, if it fits.
    Nodes(DarkFamily),
}

impl ReservoirRule {
    pub fn sites(self, n_sites: usize) -> Vec<usize> {
        let nodes = |f: DarkFamily| f.pattern(n_sites).iter().enumerate().filter(|(_, &a)| a == 0.0).map(|(i, _)| i).collect();
        match self {
            Self::Edges => vec![0, n_sites - 1],
            Self::EveryZero => families_for(n_sites).first().map(|&f| nodes(f)).unwrap_or_default(),
            Self::Nodes(f) if f.fits(n_sites) => nodes(f),
            Self::Nodes(_) => Vec::new(),
        }
    }
}

impl std::fmt::Display for ReservoirRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Edges => "edges",
            Self::EveryZero => "every_zero",
            Self::Nodes(DarkFamily::Set1) => "set1_nodes",
            Self::Nodes(DarkFamily::Set2) => "set2_nodes",
        })
    }
}

impl std::str::FromStr for ReservoirRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "edges" => Ok(Self::Edges),
            "every_zero" => Ok(Self::EveryZero),
            "set1_nodes" => Ok(Self::Nodes(DarkFamily::Set1)),
            "set2_nodes" => Ok(Self::Nodes(DarkFamily::Set2)),
            other => Err(format!("unknown reservoir rule `{other}` (edges, every_zero, set1_nodes, set2_nodes)")),
        }
    }
}

impl std::fmt::Display for DarkFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Set1 => "set1",
            Self::Set2 => "set2",
        })
    }
}

/// H_xy restricted to n = 1: off-diagonals J_ij, diagonal +Δ̄_i.
pub fn hxy_matrix_n1(model: &EffectiveModel) -> DMatrix<f64> {
    let n = model.n_sites;
    DMatrix::from_fn(n, n, |a, b| if a == b { model.delta_ls[a] } else { model.j[a][b] })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DarkState {
    pub energy: f64,
    /// Normalized, real, largest amplitude positive.
    pub amplitudes: Vec<f64>,
    pub max_reservoir_amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DarkScanResult {
    pub xi: Option<f64>,
    pub eigenvalues: Vec<f64>,
    /// Column μ holds α_{·,μ}.
    pub eigenvectors: DMatrix<f64>,
    pub reservoir: Vec<usize>,
    /// Eigenvectors which are themselves dark.
    pub dark_indices: Vec<usize>,
    /// Orthonormal basis of the dark subspace, one entry per dimension;
    /// degenerate clusters are resolved inside the cluster.
    pub dark_states: Vec<DarkState>,
    /// Set when there is exactly one dark state and it matches a family.
    pub pattern_match: Option<DarkFamily>,
    /// Largest ‖Hv − εv‖ / ‖H‖ over the eigenpairs.
    pub residual: f64,
}

impl DarkScanResult {
    /// |ε₁⟩ when the dark state is unique.
    pub fn unique(&self) -> Option<&DarkState> {
        (self.dark_states.len() == 1).then(|| &self.dark_states[0])
    }
}

fn orient(v: &mut [f64]) {
    let lead = v.iter().copied().fold(0.0f64, |m, x| if x.abs() > m.abs() + 1e-12 { x } else { m });
    if lead < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Whether `v` matches `family` up to normalization and global sign.
pub fn matches_pattern(v: &[f64], family: DarkFamily) -> bool {
    let n = v.len();
    if !family.fits(n) {
        return false;
    }
    let pat = family.pattern(n);
    let scale = (family.k(n) as f64).sqrt();
    let dot: f64 = v.iter().zip(&pat).map(|(a, b)| a * b).sum();
    let sign = if dot < 0.0 { -1.0 } else { 1.0 };
    v.iter().zip(&pat).all(|(a, b)| (sign * a * scale - b).abs() < 1e-8)
}

/// Eigendecomposition of `matrix` and its dark subspace for `reservoir`.
pub fn find_dark_states(matrix: &DMatrix<f64>, reservoir: &[usize], threshold: f64) -> Result<DarkScanResult, DarkStateError> {
    let n = matrix.nrows();
    if matrix.ncols() != n || (matrix - matrix.transpose()).amax() > 1e-12 * matrix.amax().max(1e-300) {
        return Err(DarkStateError::NotSymmetric);
    }
    if reservoir.is_empty() {
        return Err(DarkStateError::EmptyReservoir);
    }
    if let Some(&index) = reservoir.iter().find(|&&i| i >= n) {
        return Err(DarkStateError::ReservoirOutOfRange { index, n_sites: n });
    }
    let (vals, vecs) = eigh_real(matrix);
    let scale = matrix.amax().max(1e-300);
    let residual = (0..n)
        .map(|k| (matrix * vecs.column(k) - vecs.column(k) * vals[k]).norm() / scale)
        .fold(0.0, f64::max);

    let dark_indices: Vec<usize> = (0..n).filter(|&k| reservoir.iter().all(|&i| vecs[(i, k)].abs() < threshold)).collect();

    let mut dark_states = Vec::new();
    let cluster_tol = 1e-9 * scale;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && vals[end] - vals[end - 1] < cluster_tol {
            end += 1;
        }
        let v = vecs.columns(start, end - start).into_owned();
        // null space of the reservoir rows within the cluster; zero rows pad
        // the system so the thin SVD returns a full set of right vectors
        let g = end - start;
        let rows = DMatrix::from_fn(reservoir.len() + g, g, |r, c| if r < reservoir.len() { v[(reservoir[r], c)] } else { 0.0 });
        let svd = rows.svd(false, true);
        let v_t = svd.v_t.expect("right singular vectors requested");
        for (c, &sigma) in svd.singular_values.iter().enumerate() {
            if sigma < threshold {
                let mut amp: Vec<f64> = (&v * v_t.row(c).transpose()).iter().copied().collect();
                let norm = amp.iter().map(|x| x * x).sum::<f64>().sqrt();
                amp.iter_mut().for_each(|x| *x /= norm);
                orient(&mut amp);
                let energy = vals[start..end].iter().sum::<f64>() / g as f64;
                let max_res = reservoir.iter().map(|&i| amp[i].abs()).fold(0.0, f64::max);
                dark_states.push(DarkState { energy, amplitudes: amp, max_reservoir_amplitude: max_res });
            }
        }
        start = end;
    }
    let pattern_match = match dark_states.as_slice() {
        [only] => families_for(n).into_iter().find(|&f| matches_pattern(&only.amplitudes, f)),
        _ => None,
    };
    Ok(DarkScanResult { xi: None, eigenvalues: vals, eigenvectors: vecs, reservoir: reservoir.to_vec(), dark_indices, dark_states, pattern_match, residual })
}

/// Parameters of the chain used by the scans; the dark states do not depend
/// on Ω or a0 at fixed ξ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainParams {
    pub a0: f64,
    pub omega: f64,
    pub gamma_ratio: f64,
}

impl Default for ChainParams {
    fn default() -> Self {
        Self { a0: 0.26, omega: 1.0e3, gamma_ratio: 1.0e4 }
    }
}

/// Truncated single-excitation block of an N-site chain.
pub fn chain_block(n_sites: usize, xi: f64, params: ChainParams, truncation: Truncation) -> Result<(EffectiveModel, DMatrix<f64>), DarkStateError> {
    let sys = PhysicalSystem::new(n_sites, xi, params.a0, params.omega, params.gamma_ratio)?;
    let model = build_effective_model(&sys.lattice, &sys.drive, truncation)?;
    let h = hxy_matrix_n1(&model);
    Ok((model, h))
}

/// Dark-state analysis of one chain.
pub fn dark_scan(n_sites: usize, xi: f64, rule: ReservoirRule, params: ChainParams) -> Result<DarkScanResult, DarkStateError> {
    let (_, h) = chain_block(n_sites, xi, params, Truncation::NextNearest)?;
    let reservoir = rule.sites(n_sites);
    let mut r = find_dark_states(&h, &reservoir, DARK_THRESHOLD)?;
    r.xi = Some(xi);
    Ok(r)
}

/// Witness of a single-excitation state with real amplitudes on the sites
/// where it is non-zero; `phase_aligned` drops the signs (a product of local
/// σz rotations). Returns (k, Δ, k_m).
pub fn dark_state_witness(amplitudes: &[f64], phase_aligned: bool) -> Result<(usize, f64, usize), DarkStateError> {
    let max = amplitudes.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let support: Vec<f64> = amplitudes.iter().copied().filter(|x| x.abs() > NODE_TOL * max).collect();
    let k = support.len();
    if k == 0 {
        return Ok((0, 0.0, 1));
    }
    let a: Vec<f64> = support.iter().map(|&x| if phase_aligned { x.abs() } else { x }).collect();
    let norm2: f64 = a.iter().map(|x| x * x).sum();
    let block = CMatrix::from_fn(k, k, |i, j| C64::new(a[i] * a[j] / norm2, 0.0));
    let basis = WProjectorBasis::for_register(k)?;
    let stats = ExcitationStats { p0: 0.0, p1: 1.0, p_ge2: 0.0 };
    let report = witness_from_parts(stats, &block, &basis, k)?;
    Ok((k, report.delta, report.k_min))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub n_sites: usize,
    pub xi: f64,
    pub rule: ReservoirRule,
    pub n_dark: usize,
    /// Non-zero amplitudes of |ε₁⟩ (0 when absent).
    pub k: usize,
    /// Δ of |ε₁⟩ on its support, phase-aligned frame, y_c = 0.
    pub delta: f64,
    /// Δ with the eigenvector's own signs.
    pub delta_signed: f64,
    pub k_m: usize,
    pub k_m_signed: usize,
    pub pattern_match: Option<DarkFamily>,
}

/// Dark-state scan over chain lengths.
pub fn scaling_scan(n_list: &[usize], xi: f64, rule: ReservoirRule, params: ChainParams, exec: Execution) -> Result<Vec<ScalingRow>, DarkStateError> {
    exec.map(n_list.len(), |idx| {
        let n = n_list[idx];
        let empty = ScalingRow { n_sites: n, xi, rule, n_dark: 0, k: 0, delta: f64::NAN, delta_signed: f64::NAN, k_m: 0, k_m_signed: 0, pattern_match: None };
        if rule.sites(n).is_empty() {
            return Ok(empty);
        }
        let r = dark_scan(n, xi, rule, params)?;
        let Some(dark) = r.unique() else {
            return Ok(ScalingRow { n_dark: r.dark_states.len(), ..empty });
        };
        let (k, delta, k_m) = dark_state_witness(&dark.amplitudes, true)?;
        let (_, delta_signed, k_m_signed) = dark_state_witness(&dark.amplitudes, false)?;
        Ok(ScalingRow { n_dark: 1, k, delta, delta_signed, k_m, k_m_signed, pattern_match: r.pattern_match, ..empty })
    })
    .into_iter()
    .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationReport {
    /// max_i Σ_{x>2} |J_{i,i+x}| / min(|J_{i,i+1}|, |J_{i,i+2}|).
    pub tail_ratio: f64,
    /// max over i and x > 2 of |J_{i,i+x}| / |J_{i,i+1}|.
    pub max_single_ratio: f64,
    /// (‖H_full − H_truncated‖₂ / J)², a first-order infidelity scale.
    pub fidelity_perturbation: f64,
    /// tail_ratio ≥ 10⁻².
    pub violated: bool,
}

/// Size of the hopping dropped by the next-nearest truncation.
pub fn truncation_error_report(spec: &LatticeSpec, drive: &DriveConfig) -> Result<TruncationReport, DarkStateError> {
    let full = build_effective_model(spec, drive, Truncation::Full)?;
    let cut = build_effective_model(spec, drive, Truncation::NextNearest)?;
    let n = spec.n_sites;
    let mut tail_ratio: f64 = 0.0;
    let mut max_single: f64 = 0.0;
    for i in 0..n {
        let tail: f64 = (0..n).filter(|&j| j.abs_diff(i) > 2).map(|j| full.j[i][j].abs()).sum();
        let near: Vec<f64> = (0..n).filter(|&j| matches!(j.abs_diff(i), 1 | 2)).map(|j| full.j[i][j].abs()).collect();
        let nn = (0..n).filter(|&j| j.abs_diff(i) == 1).map(|j| full.j[i][j].abs()).fold(0.0, f64::max);
        let floor = near.iter().copied().fold(f64::INFINITY, f64::min);
        if tail > 0.0 {
            tail_ratio = tail_ratio.max(tail / floor);
        }
        for j in (0..n).filter(|&j| j.abs_diff(i) > 2) {
            max_single = max_single.max(full.j[i][j].abs() / nn);
        }
    }
    let diff = hxy_matrix_n1(&full) - hxy_matrix_n1(&cut);
    let op = eigh_real(&diff).0.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    Ok(TruncationReport {
        tail_ratio,
        max_single_ratio: max_single,
        fidelity_perturbation: (op / full.j_scale()).powi(2),
        violated: tail_ratio >= 1e-2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn xi1() -> f64 {
        dark_resonance_xi(6)
    }

    #[test]
    fn four_site_block() {
        let (model, h) = chain_block(4, xi1(), ChainParams::default(), Truncation::NextNearest).unwrap();
        let j = model.j_scale();
        let expect = [[-1.0, 1.0, -1.0, 0.0], [1.0, 0.0, 1.0, -1.0], [-1.0, 1.0, 0.0, 1.0], [0.0, -1.0, 1.0, -1.0]];
        for a in 0..4 {
            for b in 0..4 {
                assert_abs_diff_eq!(h[(a, b)] / j, expect[a][b], epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn two_site_block() {
        let (model, h) = chain_block(2, 1.3, ChainParams::default(), Truncation::NextNearest).unwrap();
        assert_eq!(h[(0, 0)], model.delta_ls[0]);
        assert_eq!(h[(1, 1)], model.delta_ls[1]);
        assert_eq!(h[(0, 1)], model.j[0][1]);
    }

    #[test]
    fn four_site_dark_state() {
        let r = dark_scan(4, xi1(), ReservoirRule::Edges, ChainParams::default()).unwrap();
        let d = r.unique().expect("one dark state");
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for (a, e) in d.amplitudes.iter().zip([0.0, s, s, 0.0]) {
            assert_abs_diff_eq!(*a, e, epsilon = 1e-10);
        }
        let (model, _) = chain_block(4, xi1(), ChainParams::default(), Truncation::NextNearest).unwrap();
        assert_abs_diff_eq!(d.energy / model.j_scale(), 1.0, epsilon = 1e-9);
        assert_eq!(r.pattern_match, Some(DarkFamily::Set1));
        assert!(r.residual < 1e-10);
    }

    #[test]
    fn six_site_dark_state() {
        let r = dark_scan(6, xi1(), ReservoirRule::Edges, ChainParams::default()).unwrap();
        let d = r.unique().expect("one dark state");
        for (a, e) in d.amplitudes.iter().zip([0.0, 0.5, 0.5, 0.5, 0.5, 0.0]) {
            assert_abs_diff_eq!(*a, e, epsilon = 1e-10);
        }
        assert_eq!(r.pattern_match, Some(DarkFamily::Set2));
    }

    #[test]
    fn five_sites_have_no_dark_state() {
        let r = dark_scan(5, xi1(), ReservoirRule::Edges, ChainParams::default()).unwrap();
        assert!(r.dark_states.is_empty());
        assert!(r.dark_indices.is_empty());
    }

    #[test]
    fn shared_members_have_two_dark_states() {
        let r = dark_scan(16, xi1(), ReservoirRule::Edges, ChainParams::default()).unwrap();
        assert_eq!(r.dark_states.len(), 2);
        assert!(r.pattern_match.is_none());
        let every = dark_scan(16, xi1(), ReservoirRule::EveryZero, ChainParams::default()).unwrap();
        assert_eq!(every.pattern_match, Some(DarkFamily::Set2));
        let set1 = dark_scan(16, xi1(), ReservoirRule::Nodes(DarkFamily::Set1), ChainParams::default()).unwrap();
        assert_eq!(set1.pattern_match, Some(DarkFamily::Set1));
    }

    #[test]
    fn dark_state_ignores_drive_strength() {
        let a = dark_scan(10, xi1(), ReservoirRule::Edges, ChainParams::default()).unwrap();
        let b = dark_scan(10, xi1(), ReservoirRule::Edges, ChainParams { omega: 300.0, ..Default::default() }).unwrap();
        let (da, db) = (a.unique().unwrap(), b.unique().unwrap());
        for (x, y) in da.amplitudes.iter().zip(&db.amplitudes) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-12);
        }
        let ja = chain_block(10, xi1(), ChainParams::default(), Truncation::NextNearest).unwrap().0.j_scale();
        let jb = chain_block(10, xi1(), ChainParams { omega: 300.0, ..Default::default() }, Truncation::NextNearest).unwrap().0.j_scale();
        assert_abs_diff_eq!(da.energy / db.energy, ja / jb, epsilon = 1e-9);
    }

    #[test]
    fn family_bookkeeping() {
        assert!(DarkFamily::Set1.listed(4) && DarkFamily::Set1.listed(124));
        assert!(!DarkFamily::Set1.listed(7) && DarkFamily::Set1.fits(7));
        assert!(DarkFamily::Set2.listed(126) && DarkFamily::Set2.listed(6));
        assert_eq!(DarkFamily::Set1.k(124), 82);
        assert_eq!(DarkFamily::Set2.k(126), 100);
        assert!(families_for(128).is_empty());
        assert!(ReservoirRule::EveryZero.sites(128).is_empty());
        assert_eq!(ReservoirRule::Nodes(DarkFamily::Set1).sites(10), vec![0, 3, 6, 9]);
        assert!(ReservoirRule::Nodes(DarkFamily::Set2).sites(10).is_empty());
        for rule in [ReservoirRule::Edges, ReservoirRule::EveryZero, ReservoirRule::Nodes(DarkFamily::Set1), ReservoirRule::Nodes(DarkFamily::Set2)] {
            assert_eq!(rule.to_string().parse::<ReservoirRule>().unwrap(), rule);
        }
    }

    #[test]
    fn witness_of_small_dark_states() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let (k, d, km) = dark_state_witness(&[0.0, s, s, 0.0], true).unwrap();
        assert_eq!((k, km), (2, 2));
        assert_abs_diff_eq!(d, 0.0, epsilon = 1e-14);
        let (k, d, km) = dark_state_witness(&[0.0, 0.5, 0.5, 0.5, 0.5, 0.0], true).unwrap();
        assert_eq!((k, km), (4, 4));
        assert_abs_diff_eq!(d, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn truncation_tail() {
        let sys = PhysicalSystem::new(20, xi1(), 0.26, 1e3, 1e4).unwrap();
        let r = truncation_error_report(&sys.lattice, &sys.drive).unwrap();
        assert!(r.tail_ratio > 0.0 && r.tail_ratio < 0.1, "{r:?}");
        let sys = PhysicalSystem::new(20, 0.36, 0.26, 1e3, 1e4).unwrap();
        assert!(truncation_error_report(&sys.lattice, &sys.drive).unwrap().violated);
        let sys = PhysicalSystem::new(3, xi1(), 0.26, 1e3, 1e4).unwrap();
        let r = truncation_error_report(&sys.lattice, &sys.drive).unwrap();
        assert_eq!(r.tail_ratio, 0.0);
        assert_eq!(r.fidelity_perturbation, 0.0);
    }
}
