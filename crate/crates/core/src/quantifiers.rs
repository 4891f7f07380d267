//! Concurrence, purity and CHSH maximum for two-qubit X states.
//!
//! An X state has non-zero entries only on the diagonal and the
//! anti-diagonal. For such states every quantifier has a closed form in the
//! four populations and the two coherence moduli; the remainder
//! `R = B²/4 − P − C²` has one closed form per region of the
//! `(u₂ ≷ u₃, K₁ ≷ K₂)` plane.
//!
//! Two independent routes back the closed forms: the Wootters concurrence
//! from the 2×2 blocks of `ρρ̃`, and the Horodecki CHSH maximum from the
//! spectrum of `TᵀT` (also checked against a seeded brute-force search).

use core::fmt;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{check_range, Error, Result};
use crate::math;
use crate::qmat::{self, eigvals_sym3, ComplexMatrix, DensityMatrix, Real3};
use crate::sample;

/// Default tolerance for entries outside the X pattern.
pub const X_TOL: f64 = 1e-10;
/// Slack on the X-state population and block-positivity invariants.
pub const X_STATE_TOL: f64 = 1e-10;
/// Residual above which [`cpb_triplet`] reports an identity violation.
pub const IDENTITY_ALARM: f64 = 1e-6;

/// The seven real parameters of an X state.
///
/// `c14 = ρ₁₄ = ⟨11|ρ|00⟩` and `c23 = ρ₂₃ = ⟨10|ρ|01⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XState {
    pub p11: f64,
    pub p22: f64,
    pub p33: f64,
    pub p44: f64,
    pub c14: Complex64,
    pub c23: Complex64,
}

impl XState {
    /// Validated constructor.
    pub fn new(
        p11: f64,
        p22: f64,
        p33: f64,
        p44: f64,
        c14: Complex64,
        c23: Complex64,
    ) -> Result<Self> {
        let s = Self::new_unchecked(p11, p22, p33, p44, c14, c23);
        s.check()?;
        Ok(s)
    }

    /// Real-coherence shorthand used throughout the tests and closed forms.
    pub fn real(p11: f64, p22: f64, p33: f64, p44: f64, c14: f64, c23: f64) -> Result<Self> {
        Self::new(
            p11,
            p22,
            p33,
            p44,
            Complex64::new(c14, 0.0),
            Complex64::new(c23, 0.0),
        )
    }

    pub(crate) const fn new_unchecked(
        p11: f64,
        p22: f64,
        p33: f64,
        p44: f64,
        c14: Complex64,
        c23: Complex64,
    ) -> Self {
        Self {
            p11,
            p22,
            p33,
            p44,
            c14,
            c23,
        }
    }

    fn check(&self) -> Result<()> {
        let pops = [self.p11, self.p22, self.p33, self.p44];
        let finite = pops.iter().all(|p| p.is_finite())
            && [self.c14, self.c23]
                .iter()
                .all(|c| c.re.is_finite() && c.im.is_finite());
        if !finite {
            return Err(Error::InvalidParameter("non-finite X-state entry"));
        }
        for p in pops {
            check_range("population", p, -X_STATE_TOL, 1.0 + X_STATE_TOL)?;
        }
        let sum: f64 = pops.iter().sum();
        check_range("population sum", sum, 1.0 - X_STATE_TOL, 1.0 + X_STATE_TOL)?;
        if self.c14.norm_sqr() > self.p11 * self.p44 + X_STATE_TOL
            || self.c23.norm_sqr() > self.p22 * self.p33 + X_STATE_TOL
        {
            return Err(Error::InvalidParameter(
                "coherence exceeds the positivity bound of its X block",
            ));
        }
        Ok(())
    }

    pub fn populations(&self) -> [f64; 4] {
        [self.p11, self.p22, self.p33, self.p44]
    }

    /// Relabels `|0⟩ ↔ |1⟩` on qubit B: indices `1↔2`, `3↔4`.
    pub fn flip_b(&self) -> Self {
        Self::new_unchecked(self.p22, self.p11, self.p44, self.p33, self.c23, self.c14)
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::from_real_diagonal(&self.populations());
        m[(0, 3)] = self.c14;
        m[(3, 0)] = self.c14.conj();
        m[(1, 2)] = self.c23;
        m[(2, 1)] = self.c23.conj();
        m
    }

    pub fn to_density(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(self.to_matrix())
    }

    /// `K₁ = |ρ₁₄| − √(ρ₂₂ρ₃₃)`.
    pub fn k1(&self) -> f64 {
        self.c14.norm() - math::sqrt(self.p22 * self.p33)
    }

    /// `K₂ = |ρ₂₃| − √(ρ₁₁ρ₄₄)`.
    pub fn k2(&self) -> f64 {
        self.c23.norm() - math::sqrt(self.p11 * self.p44)
    }

    pub fn u1(&self) -> f64 {
        let s = self.c14.norm() + self.c23.norm();
        4.0 * s * s
    }

    pub fn u2(&self) -> f64 {
        let d = self.p11 + self.p44 - self.p22 - self.p33;
        d * d
    }

    pub fn u3(&self) -> f64 {
        let d = self.c14.norm() - self.c23.norm();
        4.0 * d * d
    }
}

/// Checks the X pattern of a 4×4 density matrix and extracts its parameters.
pub fn validate_x_state(rho: &DensityMatrix, tol: f64) -> Result<XState> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: rho.dim(),
        });
    }
    let leak = qmat::off_x_magnitude(rho.matrix());
    if leak > tol {
        return Err(Error::XLeakage(leak));
    }
    let s = XState::new_unchecked(
        rho[(0, 0)].re,
        rho[(1, 1)].re,
        rho[(2, 2)].re,
        rho[(3, 3)].re,
        rho[(0, 3)],
        rho[(1, 2)],
    );
    s.check()?;
    Ok(s)
}

/// Validates a raw matrix as a density matrix and then as an X state.
pub fn x_state_from_matrix(m: ComplexMatrix, tol: f64) -> Result<XState> {
    validate_x_state(&DensityMatrix::new(m)?, tol)
}

/// `C = 2·max{0, K₁, K₂}`.
pub fn concurrence_x(s: &XState) -> f64 {
    2.0 * s.k1().max(s.k2()).max(0.0)
}

/// Wootters concurrence through the spectrum of `ρρ̃`.
///
/// For an X state `ρ̃ = (σ_y⊗σ_y) ρ* (σ_y⊗σ_y)` is again X-shaped and `ρρ̃`
/// splits into the outer block `{|11⟩,|00⟩}` and the inner block
/// `{|10⟩,|01⟩}`; each block's eigenvalues have square roots
/// `√(ab) ± |c|` where `a, b` are the block populations and `c` its
/// coherence.
pub fn concurrence_block_oracle(s: &XState) -> f64 {
    let outer = math::sqrt(s.p11 * s.p44);
    let inner = math::sqrt(s.p22 * s.p33);
    let mut lambdas = [
        outer + s.c14.norm(),
        (outer - s.c14.norm()).abs(),
        inner + s.c23.norm(),
        (inner - s.c23.norm()).abs(),
    ];
    lambdas.sort_by(|a, b| b.total_cmp(a));
    (lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0)
}

/// `Tr ρ²`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.purity()
}

/// `Σρᵢᵢ² + 2(|ρ₂₃|² + |ρ₁₄|²)`.
pub fn purity_x(s: &XState) -> f64 {
    s.populations().iter().map(|p| p * p).sum::<f64>() + 2.0 * (s.c14.norm_sqr() + s.c23.norm_sqr())
}

/// Which of `B₁ = 2√(u₁+u₂)` and `B₂ = 2√(u₁+u₃)` attains the maximum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellBranch {
    B1,
    B2,
}

/// Closed-form CHSH maximum for X states. Ties report `B1`.
pub fn bell_max_x(s: &XState) -> (f64, BellBranch) {
    let (b1, b2) = bell_candidates(s);
    if b1 >= b2 {
        (b1, BellBranch::B1)
    } else {
        (b2, BellBranch::B2)
    }
}

fn bell_candidates(s: &XState) -> (f64, f64) {
    let u1 = s.u1();
    (2.0 * math::sqrt(u1 + s.u2()), 2.0 * math::sqrt(u1 + s.u3()))
}

fn pauli(k: usize) -> ComplexMatrix {
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let entries = match k {
        0 => [z, one, one, z],
        1 => [z, -i, i, z],
        _ => [one, z, z, -one],
    };
    ComplexMatrix::from_row_major(entries.to_vec()).expect("2×2")
}

/// Correlation tensor `Tᵢⱼ = Tr{ρ σᵢ⊗σⱼ}` with `(x, y, z)` ordering.
pub fn correlation_tensor(rho: &DensityMatrix) -> Real3 {
    let mut t = [[0.0; 3]; 3];
    for (i, row) in t.iter_mut().enumerate() {
        for (j, tij) in row.iter_mut().enumerate() {
            let op = qmat::kron(&pauli(i), &pauli(j));
            *tij = (rho.matrix() * &op).trace().re;
        }
    }
    t
}

/// Horodecki CHSH maximum `2√(m₁ + m₂)` from the two largest eigenvalues
/// of `TᵀT`. Works for any two-qubit state.
pub fn bell_max_horodecki(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: rho.dim(),
        });
    }
    let t = correlation_tensor(rho);
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = (0..3).map(|k| t[k][i] * t[k][j]).sum();
        }
    }
    let e = eigvals_sym3(&m)?;
    Ok(2.0 * math::sqrt((e[0] + e[1]).max(0.0)))
}

/// Default number of restarts for [`bell_max_bruteforce`].
pub const BRUTEFORCE_RESTARTS: usize = 64;
const MIN_SWEEPS: usize = 3;
const MAX_SWEEPS: usize = 200;
const GOLDEN_TOL: f64 = 1e-11;

/// CHSH maximum by direct search over four measurement directions.
///
/// Each direction is a pair of spherical angles. Every restart draws the
/// eight angles uniformly, then runs coordinate-wise golden-section searches
/// over a full period around the current value, sweeping until a sweep no
/// longer improves the objective (at least three sweeps).
pub fn bell_max_bruteforce(rho: &DensityMatrix, n_restarts: usize, seed: u64) -> Result<f64> {
    if n_restarts < 16 {
        return Err(Error::InvalidParameter(
            "brute-force CHSH needs at least 16 restarts",
        ));
    }
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: rho.dim(),
        });
    }
    let t = correlation_tensor(rho);
    let mut rng = sample::rng(seed);
    let mut best = 0.0_f64;
    for _ in 0..n_restarts {
        let mut angles = [0.0; 8];
        for a in angles.iter_mut() {
            *a = rng.gen_range(0.0..2.0 * math::PI);
        }
        let mut value = chsh_value(&t, &angles);
        for sweep in 0.. {
            let before = value;
            for k in 0..8 {
                let centre = angles[k];
                let arg = golden_max(
                    |x| {
                        let mut trial = angles;
                        trial[k] = x;
                        chsh_value(&t, &trial)
                    },
                    centre - math::PI,
                    centre + math::PI,
                );
                let mut trial = angles;
                trial[k] = arg;
                let v = chsh_value(&t, &trial);
                if v > value {
                    angles = trial;
                    value = v;
                }
            }
            if sweep + 1 >= MAX_SWEEPS || (sweep + 1 >= MIN_SWEEPS && value - before <= 1e-15) {
                break;
            }
        }
        best = best.max(value);
    }
    Ok(best)
}

fn direction(theta: f64, phi: f64) -> [f64; 3] {
    let st = math::sin(theta);
    [st * math::cos(phi), st * math::sin(phi), math::cos(theta)]
}

fn correlation(t: &Real3, a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let mut s = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            s += a[i] * t[i][j] * b[j];
        }
    }
    s
}

/// `|E(a,b) + E(a,b′) + E(a′,b) − E(a′,b′)|` with `E(a,b) = aᵀTb`.
pub fn chsh_value(t: &Real3, angles: &[f64; 8]) -> f64 {
    let a = direction(angles[0], angles[1]);
    let a2 = direction(angles[2], angles[3]);
    let b = direction(angles[4], angles[5]);
    let b2 = direction(angles[6], angles[7]);
    (correlation(t, &a, &b) + correlation(t, &a, &b2) + correlation(t, &a2, &b)
        - correlation(t, &a2, &b2))
    .abs()
}

fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let g = 0.5 * (math::sqrt(5.0) - 1.0);
    let mut c = hi - g * (hi - lo);
    let mut d = lo + g * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > GOLDEN_TOL {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = f(d);
        }
    }
    0.5 * (lo + hi)
}

/// Region of the `(u₂ − u₃, K₁ − K₂)` sign pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Region {
    R1,
    R2,
    R3,
    R4,
}

impl Region {
    pub fn index(self) -> u8 {
        match self {
            Region::R1 => 1,
            Region::R2 => 2,
            Region::R3 => 3,
            Region::R4 => 4,
        }
    }

    pub fn from_index(i: u8) -> Option<Self> {
        match i {
            1 => Some(Region::R1),
            2 => Some(Region::R2),
            3 => Some(Region::R3),
            4 => Some(Region::R4),
            _ => None,
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// Region 1: `u₂≥u₃, K₁≥K₂`; 2: `u₂≥u₃, K₂>K₁`; 3: `u₃>u₂, K₁≥K₂`;
/// 4 otherwise. Exact ties fall to the lower index.
pub fn classify_region(s: &XState) -> Region {
    let k1_wins = s.k1() >= s.k2();
    if s.u2() >= s.u3() {
        if k1_wins {
            Region::R1
        } else {
            Region::R2
        }
    } else if k1_wins {
        Region::R3
    } else {
        Region::R4
    }
}

fn r1_form(s: &XState) -> f64 {
    let a = s.c14.norm();
    let b = s.c23.norm();
    2.0 * (b * b - a * a + s.p11 * s.p44 - s.p22 * s.p33
        + 4.0 * a * b
        + 4.0 * a * math::sqrt(s.p22 * s.p33)
        - (s.p11 + s.p44) * (s.p22 + s.p33))
}

fn r3_form(s: &XState) -> f64 {
    let a = s.c14.norm();
    let b = s.c23.norm();
    2.0 * a * a + 6.0 * b * b - 4.0 * s.p22 * s.p33 + 8.0 * a * math::sqrt(s.p22 * s.p33)
        - s.populations().iter().map(|p| p * p).sum::<f64>()
}

/// Remainder `R` of `B²/4 − P − C² = R` from the region closed forms.
///
/// The region forms take `C = 2K` with `K` the dominant of `K₁, K₂`. For a
/// separable state that `K` is negative while `C = 0`, so `R` carries the
/// extra `4K²`.
pub fn remainder(s: &XState) -> f64 {
    let region = classify_region(s);
    let (form, k) = match region {
        Region::R1 => (r1_form(s), s.k1()),
        Region::R2 => (r1_form(&s.flip_b()), s.k2()),
        Region::R3 => (r3_form(s), s.k1()),
        Region::R4 => (r3_form(&s.flip_b()), s.k2()),
    };
    if k < 0.0 {
        form + 4.0 * k * k
    } else {
        form
    }
}

/// All quantifiers of one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CpbTriplet {
    pub c: f64,
    pub p: f64,
    pub b: f64,
    pub r: f64,
    pub region: Region,
    pub k1: f64,
    pub k2: f64,
    pub u1: f64,
    pub u2: f64,
    pub u3: f64,
    pub b1: f64,
    pub b2: f64,
}

impl CpbTriplet {
    /// `|B²/4 − P − C² − R|`.
    pub fn identity_residual(&self) -> f64 {
        (self.b * self.b / 4.0 - self.p - self.c * self.c - self.r).abs()
    }
}

/// Quantifiers of an already validated X state.
pub fn cpb_from_x(s: &XState) -> Result<CpbTriplet> {
    let (b1, b2) = bell_candidates(s);
    let triplet = CpbTriplet {
        c: concurrence_x(s),
        p: purity_x(s),
        b: b1.max(b2),
        r: remainder(s),
        region: classify_region(s),
        k1: s.k1(),
        k2: s.k2(),
        u1: s.u1(),
        u2: s.u2(),
        u3: s.u3(),
        b1,
        b2,
    };
    let residual = triplet.identity_residual();
    if !(residual <= IDENTITY_ALARM) {
        return Err(Error::IdentityViolation(residual));
    }
    Ok(triplet)
}

/// Quantifiers of an X-shaped density matrix (default X tolerance).
pub fn cpb_triplet(rho: &DensityMatrix) -> Result<CpbTriplet> {
    cpb_from_x(&validate_x_state(rho, X_TOL)?)
}

/// `(τ, S) = (C², 4(1 − P)/3)`.
pub fn convert_measures(c: f64, p: f64) -> Result<(f64, f64)> {
    const SLACK: f64 = 1e-12;
    check_range("concurrence", c, -SLACK, 1.0 + SLACK)?;
    check_range("purity", p, 0.25 - SLACK, 1.0 + SLACK)?;
    Ok((c * c, 4.0 / 3.0 * (1.0 - p)))
}
