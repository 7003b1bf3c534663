//! W projector basis and the {Δ, y_c} statistics.
//!
//! Δ is evaluated on the single-excitation part of the state, renormalized
//! by p₁ (Π_i live in the n = 1 sector, so Σ⟨Π_i⟩ = p₁ on the raw state);
//! leakage into n = 0 and n ≥ 2 is carried by y_c.

use serde::{Deserialize, Serialize};

use super::{boundary_table, EntanglementError};
use crate::states::{ExcitationStats, QuantumState};
use crate::{CMatrix, C64};

/// Orthonormal single-excitation basis of 2^m sites from the W recursion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WProjectorBasis {
    pub m: u32,
    pub n_m: usize,
    /// Site amplitudes of each |W_i^(m)⟩; entry 0 is the symmetric W state.
    pub projectors: Vec<Vec<f64>>,
}

impl WProjectorBasis {
    /// Depth for a register of `n_a` sites (smallest power of two ≥ n_a).
    pub fn for_register(n_a: usize) -> Result<Self, EntanglementError> {
        let m = n_a.max(2).next_power_of_two().trailing_zeros();
        build_w_basis(m)
    }

    /// ⟨W_i|ρ₁|W_i⟩ for an n_a × n_a block (ground-padded to n_m).
    pub fn expectations(&self, rho1: &CMatrix) -> Vec<f64> {
        let n = rho1.nrows();
        self.projectors
            .iter()
            .map(|v| {
                let mut acc = C64::new(0.0, 0.0);
                for i in 0..n {
                    if v[i] == 0.0 {
                        continue;
                    }
                    for j in 0..n {
                        acc += rho1[(i, j)] * (v[i] * v[j]);
                    }
                }
                acc.re
            })
            .collect()
    }
}

/// |W^(m)⟩ = (|W^(m−1), G⟩ ± |G, W^(m−1)⟩)/√2, plus branches first.
pub fn build_w_basis(m: u32) -> Result<WProjectorBasis, EntanglementError> {
    if m == 0 {
        return Err(EntanglementError::BadDepth);
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    // (|gr⟩ ± |rg⟩)/√2; |gr⟩ has site 1 excited
    let mut vs = vec![vec![r, r], vec![-r, r]];
    for _ in 1..m {
        let mut next = Vec::with_capacity(2 * vs.len());
        for sign in [1.0, -1.0] {
            for v in &vs {
                let mut w: Vec<f64> = v.iter().map(|x| x * r).collect();
                w.extend(v.iter().map(|x| sign * x * r));
                next.push(w);
            }
        }
        vs = next;
    }
    Ok(WProjectorBasis { m, n_m: 1 << m, projectors: vs })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub delta: f64,
    /// None when p₁ = 0 or the register has a single site.
    pub y_c: Option<f64>,
    pub projector_expectations: Vec<f64>,
    pub p0: f64,
    pub p1: f64,
    pub p_ge2: f64,
    pub n_a: usize,
    pub n_m: usize,
    /// Δ_b^(k−1) at this y_c for k−1 = 1..=n_m.
    pub bounds: Vec<f64>,
    pub k_min: usize,
    /// Tiers k−1 with Δ_b^(k−1) < Δ_b^(k).
    pub ambiguity_flags: Vec<usize>,
}

/// Witness for a state on the probed register A (all of its sites).
pub fn witness(state: &QuantumState, basis: &WProjectorBasis) -> Result<WitnessReport, EntanglementError> {
    let (stats, block) = state.single_excitation_block();
    witness_from_parts(stats, &block, basis, state.n_sites())
}

/// Witness from excitation statistics and the unnormalized block
/// ⟨r_i|ρ|r_j⟩ over the `n_a` register sites.
pub fn witness_from_parts(stats: ExcitationStats, block: &CMatrix, basis: &WProjectorBasis, n_a: usize) -> Result<WitnessReport, EntanglementError> {
    if n_a > basis.n_m || block.nrows() != n_a {
        return Err(EntanglementError::RegisterTooLarge { n_a, n_m: basis.n_m });
    }
    let (delta, expectations, y_c) = if stats.p1 > 0.0 {
        let rho1 = block / C64::new(stats.p1, 0.0);
        let e = basis.expectations(&rho1);
        let d = e.iter().map(|p| p - p * p).sum::<f64>().max(0.0);
        let y = (n_a >= 2).then(|| 2.0 * n_a as f64 / (n_a as f64 - 1.0) * stats.p_ge2.max(0.0) * stats.p0.max(0.0) / (stats.p1 * stats.p1));
        (d, e, y)
    } else {
        (0.0, vec![0.0; basis.n_m], None)
    };
    let table = boundary_table(basis.n_m, n_a, y_c.unwrap_or(0.0))?;
    let mut report = WitnessReport {
        delta,
        y_c,
        projector_expectations: expectations,
        p0: stats.p0,
        p1: stats.p1,
        p_ge2: stats.p_ge2,
        n_a,
        n_m: basis.n_m,
        bounds: table.iter().map(|r| r.bound).collect(),
        k_min: 1,
        ambiguity_flags: table.iter().filter(|r| r.ambiguous).map(|r| r.k_minus_1).collect(),
    };
    report.k_min = certify_depth(&report);
    Ok(report)
}

/// Conservative depth: the first tier k' the state fails to beat
/// (Δ ≥ Δ_b^(k')); N_A when it beats every tier below N_A. Non-monotone
/// tiers above the first failure are never used.
pub fn certify_depth(report: &WitnessReport) -> usize {
    if report.y_c.is_none() && report.p1 <= 0.0 {
        return 1;
    }
    for k in 1..report.n_a {
        if report.delta >= report.bounds[k - 1] {
            return k;
        }
    }
    report.n_a.max(1)
}
