//! Maximally entangled mixed states (maximal concurrence at fixed purity).
//!
//! ```text
//!         ⎡ g   0   0      γ/2 ⎤
//! ρ(γ) =  ⎢ 0   0   0      0   ⎥      g = γ/2 for γ ≥ 2/3, else 1/3
//!         ⎢ 0   0   1 − 2g 0   ⎥
//!         ⎣ γ/2 0   0      g   ⎦
//! ```
//!
//! The parameter γ equals the concurrence.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{check_range, Result};
use crate::math;
use crate::quantifiers::{purity_x, Region, XState};

/// The MEMS parameter `γ ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct MemsParam(f64);

impl MemsParam {
    pub fn new(gamma: f64) -> Result<Self> {
        check_range("gamma", gamma, 0.0, 1.0)?;
        Ok(Self(gamma))
    }

    pub fn gamma(self) -> f64 {
        self.0
    }

    /// `g(γ)`; the upper branch is used at γ = 2/3, where both give 1/3.
    pub fn g(self) -> f64 {
        if self.0 >= 2.0 / 3.0 {
            self.0 / 2.0
        } else {
            1.0 / 3.0
        }
    }
}

pub fn mems_state(g: MemsParam) -> XState {
    let gv = g.g();
    XState::new_unchecked(
        gv,
        0.0,
        1.0 - 2.0 * gv,
        gv,
        Complex64::new(g.gamma() / 2.0, 0.0),
        Complex64::new(0.0, 0.0),
    )
}

/// Closed-form quantifiers of `ρ(γ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MemsCpb {
    pub c: f64,
    pub p: f64,
    pub b: f64,
    pub r: f64,
    pub region: Region,
}

pub fn mems_cpb(g: MemsParam) -> MemsCpb {
    let y = g.gamma();
    let y2 = y * y;
    let (p, b_sq_quarter, r) = if y <= 1.0 / 3.0 {
        (1.0 / 3.0 + y2 / 2.0, 1.0 / 9.0 + y2, -2.0 / 9.0 - y2 / 2.0)
    } else if y < 2.0 / 3.0 {
        (1.0 / 3.0 + y2 / 2.0, 2.0 * y2, -1.0 / 3.0 + y2 / 2.0)
    } else {
        let q = 1.0 - y;
        (1.0 - 2.0 * y + 2.0 * y2, 2.0 * y2, -q * q)
    };
    // u₂ = u₃ at γ = 1/3 and at γ = 1; ties go to region 1.
    let region = if y <= 1.0 / 3.0 || y == 1.0 {
        Region::R1
    } else {
        Region::R3
    };
    MemsCpb {
        c: y,
        p,
        b: 2.0 * math::sqrt(b_sq_quarter),
        r,
        region,
    }
}

/// Purity of the MEMS with concurrence `c`.
pub fn mems_boundary(c: f64) -> Result<f64> {
    check_range("concurrence", c, 0.0, 1.0)?;
    Ok(if c < 2.0 / 3.0 {
        1.0 / 3.0 + c * c / 2.0
    } else {
        1.0 - 2.0 * c + 2.0 * c * c
    })
}

/// One state compared against the MEMS pattern.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MemsSample {
    /// `2|ρ₁₄|` after relabelling qubit B.
    pub gamma: f64,
    /// Largest entrywise distance to `ρ(γ)`.
    pub residual: f64,
    /// Whether the sample has `γ ≥ 2/3` and enters the verdict.
    pub counted: bool,
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MemsReport {
    pub samples: Vec<MemsSample>,
    /// At least one counted sample, and every counted sample matches.
    pub verdict: bool,
}

/// Checks whether states are MEMS after exchanging `|0⟩ ↔ |1⟩` on qubit B.
///
/// Only samples with `γ ≥ 2/3` enter the verdict.
pub fn is_mems_trajectory(states: &[XState], tol: f64) -> MemsReport {
    let samples: Vec<MemsSample> = states.iter().map(|s| mems_sample(s, tol)).collect();
    let mut counted = samples.iter().filter(|s| s.counted).peekable();
    let verdict = counted.peek().is_some() && counted.all(|s| s.matches);
    MemsReport { samples, verdict }
}

fn mems_sample(s: &XState, tol: f64) -> MemsSample {
    let f = s.flip_b();
    let gamma = 2.0 * f.c14.norm();
    let residual = match MemsParam::new(gamma) {
        Ok(g) => {
            let m = mems_state(g);
            [
                f.p11 - m.p11,
                f.p22 - m.p22,
                f.p33 - m.p33,
                f.p44 - m.p44,
                f.c23.norm(),
            ]
            .iter()
            .fold(0.0_f64, |acc, d| acc.max(d.abs()))
        }
        Err(_) => f64::INFINITY,
    };
    MemsSample {
        gamma,
        residual,
        counted: gamma >= 2.0 / 3.0,
        matches: residual <= tol,
    }
}

/// A state whose purity lies below the MEMS curve at its concurrence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryViolation {
    pub index: usize,
    pub c: f64,
    pub p: f64,
    pub boundary: f64,
}

/// States with `P < mems_boundary(C) − tol`.
pub fn boundary_violations(states: &[XState], tol: f64) -> Vec<BoundaryViolation> {
    states
        .iter()
        .enumerate()
        .filter_map(|(index, s)| {
            let c = crate::quantifiers::concurrence_x(s).min(1.0);
            let p = purity_x(s);
            let boundary = mems_boundary(c).ok()?;
            (p < boundary - tol).then_some(BoundaryViolation {
                index,
                c,
                p,
                boundary,
            })
        })
        .collect()
}
