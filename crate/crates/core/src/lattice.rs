//! Zigzag (staggered triangular) chain geometry and power-law blockade shifts.
//!
//! Site `2k` sits at `(k·a1, 0)` and site `2k+1` at
//! `(k·a1 + a0·cosθ, a0·sinθ)` with `cosθ = ξ/2`, so consecutive sites are
//! `a0` apart and sites two apart are `a1 = ξ·a0` apart.
//!
//! Lengths are measured in units of the blockade distance d_B. With the
//! power-broadened linewidth `w_d` the interaction coefficient is then
//! `C_p = w_d` and the nearest-neighbour shift is `w_d·a0^(-p)`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LatticeError {
    #[error("n_sites must be at least 2, got {0}")]
    TooFewSites(usize),
    #[error("xi must lie in (0, 2), got {0}")]
    BadAspectRatio(f64),
    #[error("a0 must be positive and finite, got {0}")]
    BadSpacing(f64),
    #[error("interaction exponent p must be at least 1, got {0}")]
    BadExponent(u32),
    #[error("interaction coefficient must be positive and finite, got {0}")]
    BadCoefficient(f64),
    #[error("pair shift of a site with itself is undefined (site {0})")]
    SelfPair(usize),
    #[error("site index {index} out of range for {n_sites} sites")]
    SiteOutOfRange { index: usize, n_sites: usize },
    #[error("blockade radius inputs must be positive (cp={cp}, w_d={w_d}, p={p})")]
    BadBlockadeInput { cp: f64, w_d: f64, p: u32 },
}

/// Geometry and interaction parameters of the chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub n_sites: usize,
    /// Nearest-neighbour spacing in units of d_B.
    pub a0: f64,
    /// a1 / a0.
    pub xi: f64,
    pub p: u32,
    /// C_p in units of Γ·d_B^p.
    pub cp: f64,
}

impl LatticeSpec {
    pub fn new(n_sites: usize, a0: f64, xi: f64, p: u32, cp: f64) -> Result<Self, LatticeError> {
        let spec = Self { n_sites, a0, xi, p, cp };
        spec.validate()?;
        Ok(spec)
    }

    /// Spec with `C_p = w_d`, i.e. lengths in units of the blockade distance.
    pub fn in_blockade_units(n_sites: usize, a0: f64, xi: f64, p: u32, w_d: f64) -> Result<Self, LatticeError> {
        Self::new(n_sites, a0, xi, p, w_d)
    }

    pub fn validate(&self) -> Result<(), LatticeError> {
        if self.n_sites < 2 {
            return Err(LatticeError::TooFewSites(self.n_sites));
        }
        if !(self.xi > 0.0 && self.xi < 2.0) {
            return Err(LatticeError::BadAspectRatio(self.xi));
        }
        if !(self.a0 > 0.0 && self.a0.is_finite()) {
            return Err(LatticeError::BadSpacing(self.a0));
        }
        if self.p < 1 {
            return Err(LatticeError::BadExponent(self.p));
        }
        if !(self.cp > 0.0 && self.cp.is_finite()) {
            return Err(LatticeError::BadCoefficient(self.cp));
        }
        Ok(())
    }

    pub fn a1(&self) -> f64 {
        self.xi * self.a0
    }

    /// Shift between consecutive sites, `C_p·a0^(-p)`.
    pub fn nearest_shift(&self) -> f64 {
        self.cp * self.a0.powi(-(self.p as i32))
    }

    fn check_site(&self, i: usize) -> Result<(), LatticeError> {
        if i >= self.n_sites {
            return Err(LatticeError::SiteOutOfRange { index: i, n_sites: self.n_sites });
        }
        Ok(())
    }
}

/// Site positions in the canonical zigzag layout.
pub fn build_positions(spec: &LatticeSpec) -> Result<Vec<[f64; 2]>, LatticeError> {
    spec.validate()?;
    let cos_t = spec.xi / 2.0;
    let sin_t = (1.0 - cos_t * cos_t).sqrt();
    let a1 = spec.a1();
    Ok((0..spec.n_sites)
        .map(|i| {
            let k = (i / 2) as f64;
            if i % 2 == 0 {
                [k * a1, 0.0]
            } else {
                [k * a1 + spec.a0 * cos_t, spec.a0 * sin_t]
            }
        })
        .collect())
}

fn distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Pair shift `C_p·|x_i − x_j|^(−p)`.
pub fn pair_shift(spec: &LatticeSpec, i: usize, j: usize) -> Result<f64, LatticeError> {
    spec.validate()?;
    spec.check_site(i)?;
    spec.check_site(j)?;
    if i == j {
        return Err(LatticeError::SelfPair(i));
    }
    let pos = build_positions(spec)?;
    Ok(shift_from_distance(spec, distance(pos[i], pos[j])))
}

fn shift_from_distance(spec: &LatticeSpec, r: f64) -> f64 {
    spec.cp * r.powi(-(spec.p as i32))
}

/// Symmetric table of all pair shifts, zero on the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct PairShiftTable {
    pub shifts: DMatrix<f64>,
}

impl PairShiftTable {
    pub fn new(spec: &LatticeSpec) -> Result<Self, LatticeError> {
        let pos = build_positions(spec)?;
        let n = spec.n_sites;
        let mut shifts = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in (i + 1)..n {
                let v = shift_from_distance(spec, distance(pos[i], pos[j]));
                shifts[(i, j)] = v;
                shifts[(j, i)] = v;
            }
        }
        Ok(Self { shifts })
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.shifts[(i, j)]
    }

    pub fn n_sites(&self) -> usize {
        self.shifts.nrows()
    }

    /// Shifts divided by the linewidth `w_d`.
    pub fn in_linewidths(&self, w_d: f64) -> DMatrix<f64> {
        &self.shifts / w_d
    }
}

/// `d_B = (C_p / w_d)^(1/p)`.
pub fn blockade_radius(cp: f64, w_d: f64, p: u32) -> Result<f64, LatticeError> {
    if !(cp > 0.0 && w_d > 0.0 && p > 0) {
        return Err(LatticeError::BadBlockadeInput { cp, w_d, p });
    }
    Ok((cp / w_d).powf(1.0 / p as f64))
}
