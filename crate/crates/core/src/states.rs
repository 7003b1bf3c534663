//! Basis bookkeeping and quantum states on N two-level atoms.
//!
//! A computational basis state is a bit mask: bit `i` set means site `i` is
//! in |r⟩. Full-space states have dimension 2^N and index = mask. Reduced
//! bases (the effective tier, the n ≤ 1 sector) keep an explicit mask list.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::linalg::{eigvalsh, hermiticity_defect};
use crate::{CMatrix, CVector, C64};

/// Tolerance used when validating states.
pub const STATE_TOL: f64 = 1e-9;

/// Largest N for which full 2^N dense objects may be built.
pub const MAX_DENSE_SITES: usize = 12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StateError {
    #[error("keep set is empty")]
    EmptyKeep,
    #[error("site {index} is out of range for {n_sites} sites")]
    SiteOutOfRange { index: usize, n_sites: usize },
    #[error("site {0} listed twice")]
    DuplicateSite(usize),
    #[error("state has {got} amplitudes, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("pure state norm {0} differs from 1")]
    NotNormalized(f64),
    #[error("density matrix trace {0} differs from 1")]
    BadTrace(f64),
    #[error("density matrix Hermiticity defect {0}")]
    NotHermitian(f64),
    #[error("density matrix has eigenvalue {0} below tolerance")]
    NotPositive(f64),
    #[error("coefficient list has length {got}, expected {expected}")]
    CoefficientLength { expected: usize, got: usize },
    #[error("coefficient vector is zero")]
    ZeroCoefficients,
    #[error("{0} sites exceed the dense limit of {MAX_DENSE_SITES}")]
    TooLarge(usize),
    #[error("basis state {0:#b} is not in the basis")]
    NotInBasis(u64),
    #[error("malformed state document: {0}")]
    Document(String),
}

/// Ordered list of computational basis masks with reverse lookup.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    n_sites: usize,
    masks: Vec<u64>,
    lookup: HashMap<u64, usize>,
}

impl Basis {
    fn from_masks(n_sites: usize, masks: Vec<u64>) -> Self {
        let lookup = masks.iter().enumerate().map(|(k, &m)| (m, k)).collect();
        Self { n_sites, masks, lookup }
    }

    /// All 2^N states, index = mask.
    pub fn full(n_sites: usize) -> Result<Self, StateError> {
        if n_sites > MAX_DENSE_SITES {
            return Err(StateError::TooLarge(n_sites));
        }
        Ok(Self::from_masks(n_sites, (0..1u64 << n_sites).collect()))
    }

    /// Effective-tier basis: |G⟩, the N single excitations, then the N−1
    /// nearest-neighbour doubles |r_i r_{i+1}⟩.
    pub fn effective(n_sites: usize) -> Self {
        let mut masks = vec![0u64];
        masks.extend((0..n_sites).map(|i| 1u64 << i));
        masks.extend((0..n_sites.saturating_sub(1)).map(|i| (1u64 << i) | (1u64 << (i + 1))));
        Self::from_masks(n_sites, masks)
    }

    /// |G⟩ followed by the N single excitations.
    pub fn up_to_one(n_sites: usize) -> Self {
        let mut masks = vec![0u64];
        masks.extend((0..n_sites).map(|i| 1u64 << i));
        Self::from_masks(n_sites, masks)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.masks.len()
    }

    pub fn masks(&self) -> &[u64] {
        &self.masks
    }

    pub fn mask(&self, k: usize) -> u64 {
        self.masks[k]
    }

    pub fn index_of(&self, mask: u64) -> Option<usize> {
        self.lookup.get(&mask).copied()
    }

    pub fn is_full(&self) -> bool {
        self.masks.len() == 1usize << self.n_sites
    }

    /// Indices of basis states with exactly `n` excitations, in basis order.
    pub fn subspace(&self, n: u32) -> Vec<usize> {
        (0..self.dim()).filter(|&k| self.masks[k].count_ones() == n).collect()
    }

    /// Lift an operator on this basis into the full 2^N space.
    pub fn embed_operator(&self, op: &CMatrix) -> Result<CMatrix, StateError> {
        let full = 1usize << self.n_sites;
        if self.n_sites > MAX_DENSE_SITES {
            return Err(StateError::TooLarge(self.n_sites));
        }
        let mut out = CMatrix::zeros(full, full);
        for a in 0..self.dim() {
            for b in 0..self.dim() {
                out[(self.masks[a] as usize, self.masks[b] as usize)] = op[(a, b)];
            }
        }
        Ok(out)
    }

    /// Lift a vector on this basis into the full 2^N space.
    pub fn embed_vector(&self, v: &CVector) -> Result<CVector, StateError> {
        if self.n_sites > MAX_DENSE_SITES {
            return Err(StateError::TooLarge(self.n_sites));
        }
        let mut out = CVector::zeros(1usize << self.n_sites);
        for a in 0..self.dim() {
            out[self.masks[a] as usize] = v[a];
        }
        Ok(out)
    }

    /// Restrict a full-space vector to this basis, dropping other amplitudes.
    pub fn restrict_vector(&self, v: &CVector) -> CVector {
        CVector::from_iterator(self.dim(), self.masks.iter().map(|&m| v[m as usize]))
    }
}

/// Probabilities of total excitation number 0, 1 and ≥ 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExcitationStats {
    pub p0: f64,
    pub p1: f64,
    pub p_ge2: f64,
}

/// Pure or mixed state on the full 2^N space.
#[derive(Debug, Clone, PartialEq)]
pub enum QuantumState {
    Pure { n_sites: usize, amplitudes: CVector },
    Mixed { n_sites: usize, rho: CMatrix },
}

impl QuantumState {
    pub fn pure(n_sites: usize, amplitudes: CVector) -> Result<Self, StateError> {
        check_dim(n_sites, amplitudes.len())?;
        let s = Self::Pure { n_sites, amplitudes };
        s.validate()?;
        Ok(s)
    }

    pub fn mixed(n_sites: usize, rho: CMatrix) -> Result<Self, StateError> {
        check_dim(n_sites, rho.nrows())?;
        check_dim(n_sites, rho.ncols())?;
        let s = Self::Mixed { n_sites, rho };
        s.validate()?;
        Ok(s)
    }

    /// Mixed state without validation, for intermediate results whose
    /// physicality is checked separately.
    pub fn mixed_unchecked(n_sites: usize, rho: CMatrix) -> Self {
        Self::Mixed { n_sites, rho }
    }

    /// |g…g⟩.
    pub fn ground(n_sites: usize) -> Result<Self, StateError> {
        if n_sites > MAX_DENSE_SITES {
            return Err(StateError::TooLarge(n_sites));
        }
        let mut v = CVector::zeros(1usize << n_sites);
        v[0] = C64::new(1.0, 0.0);
        Ok(Self::Pure { n_sites, amplitudes: v })
    }

    /// Product basis state with the given mask.
    pub fn basis_state(n_sites: usize, mask: u64) -> Result<Self, StateError> {
        if n_sites > MAX_DENSE_SITES {
            return Err(StateError::TooLarge(n_sites));
        }
        if mask >> n_sites != 0 {
            return Err(StateError::NotInBasis(mask));
        }
        let mut v = CVector::zeros(1usize << n_sites);
        v[mask as usize] = C64::new(1.0, 0.0);
        Ok(Self::Pure { n_sites, amplitudes: v })
    }

    /// Embed a density matrix given on a reduced basis.
    pub fn from_basis_density(basis: &Basis, rho: &CMatrix) -> Result<Self, StateError> {
        Ok(Self::mixed_unchecked(basis.n_sites(), basis.embed_operator(rho)?))
    }

    pub fn n_sites(&self) -> usize {
        match self {
            Self::Pure { n_sites, .. } | Self::Mixed { n_sites, .. } => *n_sites,
        }
    }

    pub fn dim(&self) -> usize {
        1usize << self.n_sites()
    }

    pub fn is_pure(&self) -> bool {
        matches!(self, Self::Pure { .. })
    }

    pub fn density(&self) -> CMatrix {
        match self {
            Self::Pure { amplitudes, .. } => amplitudes * amplitudes.adjoint(),
            Self::Mixed { rho, .. } => rho.clone(),
        }
    }

    pub fn validate(&self) -> Result<(), StateError> {
        match self {
            Self::Pure { amplitudes, .. } => {
                let norm = amplitudes.norm();
                if (norm - 1.0).abs() > STATE_TOL {
                    return Err(StateError::NotNormalized(norm));
                }
            }
            Self::Mixed { rho, .. } => {
                let tr = rho.trace();
                if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
                    return Err(StateError::BadTrace(tr.re));
                }
                let h = hermiticity_defect(rho);
                if h > STATE_TOL {
                    return Err(StateError::NotHermitian(h));
                }
                let min = eigvalsh(rho).first().copied().unwrap_or(0.0);
                if min < -STATE_TOL {
                    return Err(StateError::NotPositive(min));
                }
            }
        }
        Ok(())
    }

    /// Tr ρ².
    pub fn purity(&self) -> f64 {
        match self {
            Self::Pure { amplitudes, .. } => amplitudes.norm_squared().powi(2),
            Self::Mixed { rho, .. } => rho.iter().map(|z| z.norm_sqr()).sum(),
        }
    }

    /// Population of each computational basis state.
    pub fn populations(&self) -> Vec<f64> {
        match self {
            Self::Pure { amplitudes, .. } => amplitudes.iter().map(|z| z.norm_sqr()).collect(),
            Self::Mixed { rho, .. } => (0..rho.nrows()).map(|k| rho[(k, k)].re).collect(),
        }
    }

    /// ⟨ψ|ρ|ψ⟩ for a pure vector on the same space.
    pub fn overlap_with(&self, psi: &CVector) -> f64 {
        match self {
            Self::Pure { amplitudes, .. } => psi.dotc(amplitudes).norm_sqr(),
            Self::Mixed { rho, .. } => psi.dotc(&(rho * psi)).re,
        }
    }

    /// Reduced state on `keep`. Site `keep[k]` becomes site `k` of the result.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<QuantumState, StateError> {
        partial_trace(self, keep)
    }

    pub fn excitation_statistics(&self) -> ExcitationStats {
        excitation_statistics(self)
    }

    /// Block ⟨r_i|ρ|r_j⟩ of the single-excitation sector together with the
    /// excitation statistics.
    pub fn single_excitation_block(&self) -> (ExcitationStats, CMatrix) {
        let n = self.n_sites();
        let mut block = CMatrix::zeros(n, n);
        match self {
            Self::Pure { amplitudes, .. } => {
                for i in 0..n {
                    for j in 0..n {
                        block[(i, j)] = amplitudes[1 << i] * amplitudes[1 << j].conj();
                    }
                }
            }
            Self::Mixed { rho, .. } => {
                for i in 0..n {
                    for j in 0..n {
                        block[(i, j)] = rho[(1 << i, 1 << j)];
                    }
                }
            }
        }
        (self.excitation_statistics(), block)
    }

    pub fn to_document(&self) -> StateDocument {
        let (kind, data) = match self {
            Self::Pure { amplitudes, .. } => ("pure", amplitudes.iter().flat_map(|z| [z.re, z.im]).collect()),
            Self::Mixed { rho, .. } => {
                let d = rho.nrows();
                let mut data = Vec::with_capacity(2 * d * d);
                for i in 0..d {
                    for j in 0..d {
                        data.push(rho[(i, j)].re);
                        data.push(rho[(i, j)].im);
                    }
                }
                ("mixed", data)
            }
        };
        StateDocument {
            convention: BIT_CONVENTION.to_string(),
            kind: kind.to_string(),
            n_sites: self.n_sites(),
            dim: self.dim(),
            data,
        }
    }

    pub fn from_document(doc: &StateDocument) -> Result<Self, StateError> {
        let d = doc.dim;
        if d != 1usize << doc.n_sites {
            return Err(StateError::Document(format!("dim {d} does not match n_sites {}", doc.n_sites)));
        }
        let z = |k: usize| C64::new(doc.data[2 * k], doc.data[2 * k + 1]);
        match doc.kind.as_str() {
            "pure" => {
                if doc.data.len() != 2 * d {
                    return Err(StateError::Document("pure data length".into()));
                }
                Self::pure(doc.n_sites, CVector::from_iterator(d, (0..d).map(z)))
            }
            "mixed" => {
                if doc.data.len() != 2 * d * d {
                    return Err(StateError::Document("mixed data length".into()));
                }
                Self::mixed(doc.n_sites, CMatrix::from_row_iterator(d, d, (0..d * d).map(z)))
            }
            other => Err(StateError::Document(format!("unknown kind {other}"))),
        }
    }
}

const BIT_CONVENTION: &str = "bit i of the basis index set means site i (0-based) is in |r>; row-major, interleaved re/im";

/// Serialized form of a [`QuantumState`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateDocument {
    pub convention: String,
    pub kind: String,
    pub n_sites: usize,
    pub dim: usize,
    pub data: Vec<f64>,
}

fn check_dim(n_sites: usize, got: usize) -> Result<(), StateError> {
    if n_sites > MAX_DENSE_SITES {
        return Err(StateError::TooLarge(n_sites));
    }
    let expected = 1usize << n_sites;
    if got != expected {
        return Err(StateError::DimensionMismatch { expected, got });
    }
    Ok(())
}

fn check_sites(n_sites: usize, sites: &[usize]) -> Result<(), StateError> {
    let mut seen = vec![false; n_sites];
    for &s in sites {
        if s >= n_sites {
            return Err(StateError::SiteOutOfRange { index: s, n_sites });
        }
        if seen[s] {
            return Err(StateError::DuplicateSite(s));
        }
        seen[s] = true;
    }
    Ok(())
}

/// Reduced density matrix on `keep`; site `keep[k]` maps to bit `k`.
pub fn partial_trace(state: &QuantumState, keep: &[usize]) -> Result<QuantumState, StateError> {
    let n = state.n_sites();
    if keep.is_empty() {
        return Err(StateError::EmptyKeep);
    }
    check_sites(n, keep)?;
    let rest: Vec<usize> = (0..n).filter(|s| !keep.contains(s)).collect();
    let dk = 1usize << keep.len();
    let dr = 1usize << rest.len();
    let compose = |kx: usize, rx: usize| -> usize {
        let mut m = 0usize;
        for (b, &s) in keep.iter().enumerate() {
            m |= ((kx >> b) & 1) << s;
        }
        for (b, &s) in rest.iter().enumerate() {
            m |= ((rx >> b) & 1) << s;
        }
        m
    };
    let mut out = CMatrix::zeros(dk, dk);
    match state {
        QuantumState::Pure { amplitudes, .. } => {
            for r in 0..dr {
                let col: Vec<C64> = (0..dk).map(|k| amplitudes[compose(k, r)]).collect();
                for a in 0..dk {
                    if col[a] == C64::new(0.0, 0.0) {
                        continue;
                    }
                    for b in 0..dk {
                        out[(a, b)] += col[a] * col[b].conj();
                    }
                }
            }
        }
        QuantumState::Mixed { rho, .. } => {
            for r in 0..dr {
                let idx: Vec<usize> = (0..dk).map(|k| compose(k, r)).collect();
                for a in 0..dk {
                    for b in 0..dk {
                        out[(a, b)] += rho[(idx[a], idx[b])];
                    }
                }
            }
        }
    }
    Ok(QuantumState::mixed_unchecked(keep.len(), out))
}

pub fn excitation_statistics(state: &QuantumState) -> ExcitationStats {
    let mut p = [0.0f64; 3];
    for (k, w) in state.populations().into_iter().enumerate() {
        p[(k.count_ones() as usize).min(2)] += w;
    }
    ExcitationStats { p0: p[0], p1: p[1], p_ge2: p[2] }
}

/// Normalized single-excitation superposition Σ c_k |r_{sites[k]}⟩,
/// uniform when `coefficients` is `None`.
pub fn make_w_state(n_sites: usize, sites: &[usize], coefficients: Option<&[C64]>) -> Result<QuantumState, StateError> {
    if sites.is_empty() {
        return Err(StateError::EmptyKeep);
    }
    if n_sites > MAX_DENSE_SITES {
        return Err(StateError::TooLarge(n_sites));
    }
    check_sites(n_sites, sites)?;
    let coeffs: Vec<C64> = match coefficients {
        Some(c) if c.len() != sites.len() => {
            return Err(StateError::CoefficientLength { expected: sites.len(), got: c.len() })
        }
        Some(c) => c.to_vec(),
        None => vec![C64::new(1.0, 0.0); sites.len()],
    };
    let norm = coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(StateError::ZeroCoefficients);
    }
    let mut v = CVector::zeros(1usize << n_sites);
    for (&s, c) in sites.iter().zip(&coeffs) {
        v[1usize << s] = c / norm;
    }
    Ok(QuantumState::Pure { n_sites, amplitudes: v })
}
