//! Small dense complex matrices.
//!
//! Everything here works on row-major `Vec<Complex64>` storage sized for the
//! handful of dimensions this crate needs (2, 3, 4 and `4·(n_max+1)`).

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{DensityViolation, Error, Result};
use crate::math;

/// Hermiticity tolerance for [`DensityMatrix`].
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Unit-trace tolerance for [`DensityMatrix`].
pub const TRACE_TOL: f64 = 1e-10;
/// Most negative eigenvalue accepted by [`DensityMatrix`].
pub const POSITIVITY_TOL: f64 = -1e-8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from row-major entries; the length must be a square.
    pub fn from_row_major(data: Vec<Complex64>) -> Result<Self> {
        let dim = isqrt(data.len());
        if dim * dim != data.len() || dim == 0 {
            return Err(Error::NotADensityMatrix(DensityViolation::NotSquare));
        }
        Ok(Self { dim, data })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    /// `|ψ⟩⟨ψ|` for an (unnormalised) ket.
    pub fn outer(ket: &[Complex64]) -> Self {
        Self::from_fn(ket.len(), |i, j| ket[i] * ket[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest `|m_ij − conj(m_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// `(m + m†)/2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    /// Iterates the non-zero entries as `(row, col, value)`.
    pub fn nonzeros(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        let dim = self.dim;
        self.data
            .iter()
            .enumerate()
            .filter(|(_, z)| **z != ZERO)
            .map(move |(k, z)| (k / dim, k % dim, *z))
    }

    fn check_same_dim(&self, other: &Self) {
        assert_eq!(self.dim, other.dim, "matrix dimension mismatch");
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.check_same_dim(rhs);
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.check_same_dim(rhs);
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.check_same_dim(rhs);
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

/// Tensor product; `a` carries the slow index.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (na, nb) = (a.dim, b.dim);
    ComplexMatrix::from_fn(na * nb, |i, j| a[(i / nb, j / nb)] * b[(i % nb, j % nb)])
}

/// Traces out the fast `field_dim` factor of a `(qubit_dim·field_dim)`-dim matrix.
pub fn partial_trace_field(
    full: &ComplexMatrix,
    qubit_dim: usize,
    field_dim: usize,
) -> Result<ComplexMatrix> {
    if field_dim == 0 || qubit_dim * field_dim != full.dim {
        return Err(Error::DimensionMismatch {
            expected: qubit_dim * field_dim,
            found: full.dim,
        });
    }
    Ok(ComplexMatrix::from_fn(qubit_dim, |i, j| {
        (0..field_dim)
            .map(|k| full[(i * field_dim + k, j * field_dim + k)])
            .sum()
    }))
}

/// A validated density matrix: finite, Hermitian, unit trace, positive.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::NotADensityMatrix(DensityViolation::NonFinite));
        }
        let defect = m.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::NotADensityMatrix(DensityViolation::NonHermitian(
                defect,
            )));
        }
        let tr = m.trace();
        if (tr - ONE).norm() > TRACE_TOL {
            return Err(Error::NotADensityMatrix(DensityViolation::Trace(tr.re)));
        }
        let min = min_eigenvalue(&m);
        if min < POSITIVITY_TOL {
            return Err(Error::NotADensityMatrix(DensityViolation::Negative(min)));
        }
        Ok(Self(m))
    }

    /// Normalised projector onto `ket`.
    pub fn pure(ket: &[Complex64]) -> Result<Self> {
        let norm2: f64 = ket.iter().map(|z| z.norm_sqr()).sum();
        if !(norm2 > 0.0) {
            return Err(Error::InvalidParameter("zero state vector"));
        }
        Self::new(ComplexMatrix::outer(ket).scale(Complex64::new(1.0 / norm2, 0.0)))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim).scale(Complex64::new(1.0 / dim as f64, 0.0)))
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        // Tr ρ² = Σ |ρ_ij|² for Hermitian ρ.
        self.0.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.0)
    }

    pub fn kron(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix(kron(&self.0, &other.0))
    }

    /// Reduced two-qubit state of a `4·field_dim` qubits+field state.
    pub fn partial_trace_field(&self, field_dim: usize) -> Result<DensityMatrix> {
        partial_trace_field(&self.0, 4, field_dim).map(DensityMatrix)
    }
}

impl Index<(usize, usize)> for DensityMatrix {
    type Output = Complex64;

    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.0[idx]
    }
}

/// Largest modulus among the entries outside the X pattern of a 4×4 matrix.
pub fn off_x_magnitude(m: &ComplexMatrix) -> f64 {
    if m.dim != 4 {
        return f64::INFINITY;
    }
    let mut worst = 0.0_f64;
    for i in 0..4 {
        for j in 0..4 {
            if i != j && i + j != 3 {
                worst = worst.max(m[(i, j)].norm());
            }
        }
    }
    worst
}

/// Eigenvalues of the Hermitian 2×2 matrix `[[a, c], [c*, b]]`, descending.
pub(crate) fn eig_hermitian_2x2(a: f64, b: f64, c_abs: f64) -> (f64, f64) {
    let mean = 0.5 * (a + b);
    let half = 0.5 * (a - b);
    let rad = math::sqrt(half * half + c_abs * c_abs);
    (mean + rad, mean - rad)
}

// X-pattern threshold below which the exact 2×2 block route is used.
const X_BLOCK_TOL: f64 = 1e-14;
const POWER_ITERATIONS: usize = 20_000;

/// Minimum eigenvalue of a Hermitian matrix.
///
/// X-shaped 4×4 inputs are handled exactly through their two 2×2 blocks;
/// anything else goes through power iteration on `cI − m`.
pub fn min_eigenvalue(m: &ComplexMatrix) -> f64 {
    if m.dim == 4 && off_x_magnitude(m) <= X_BLOCK_TOL {
        let outer = eig_hermitian_2x2(m[(0, 0)].re, m[(3, 3)].re, m[(0, 3)].norm());
        let inner = eig_hermitian_2x2(m[(1, 1)].re, m[(2, 2)].re, m[(1, 2)].norm());
        return outer.1.min(inner.1);
    }
    if m.dim == 1 {
        return m[(0, 0)].re;
    }
    power_iteration_min(m)
}

fn power_iteration_min(m: &ComplexMatrix) -> f64 {
    let n = m.dim;
    // Gershgorin bound: c ≥ λ_max(m), so cI − m is positive semidefinite.
    let shift = (0..n)
        .map(|i| (0..n).map(|j| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let shifted = &ComplexMatrix::identity(n).scale(Complex64::new(shift, 0.0)) - m;

    let mut v: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(1.0 + 0.37 * i as f64, 0.11 * i as f64))
        .collect();
    normalize(&mut v);
    let mut rayleigh = 0.0;
    let mut w = vec![ZERO; n];
    for _ in 0..POWER_ITERATIONS {
        for (i, wi) in w.iter_mut().enumerate() {
            *wi = (0..n).map(|j| shifted[(i, j)] * v[j]).sum();
        }
        let next: f64 = v.iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum();
        let norm = math::sqrt(w.iter().map(|z| z.norm_sqr()).sum());
        if norm == 0.0 {
            rayleigh = 0.0;
            break;
        }
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / norm;
        }
        let converged = (next - rayleigh).abs() <= 1e-16 * shift.max(1.0);
        rayleigh = next;
        if converged {
            break;
        }
    }
    shift - rayleigh
}

fn normalize(v: &mut [Complex64]) {
    let norm = math::sqrt(v.iter().map(|z| z.norm_sqr()).sum());
    for z in v {
        *z /= norm;
    }
}

/// Real 3×3 matrix, row-major.
pub type Real3 = [[f64; 3]; 3];

const SYMMETRY_TOL: f64 = 1e-12;

/// Eigenvalues of a real symmetric 3×3 matrix, descending.
///
/// The eigenvalue farthest from the other two comes from the trigonometric
/// solution of the characteristic cubic. The remaining pair is read off the
/// 2×2 restriction to the orthogonal complement of its eigenvector, which
/// keeps near-degenerate pairs accurate to rounding instead of `√ε`.
pub fn eigvals_sym3(m: &Real3) -> Result<[f64; 3]> {
    let asym = (m[0][1] - m[1][0])
        .abs()
        .max((m[0][2] - m[2][0]).abs())
        .max((m[1][2] - m[2][1]).abs());
    if !(asym <= SYMMETRY_TOL) {
        return Err(Error::NotSymmetric(asym));
    }
    let a = symmetrized(m);

    let off = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
    if off == 0.0 {
        return Ok(sorted_desc([a[0][0], a[1][1], a[2][2]]));
    }

    let q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
    let sq = |x: f64| x * x;
    let p2 = sq(a[0][0] - q) + sq(a[1][1] - q) + sq(a[2][2] - q) + 2.0 * off;
    let p = math::sqrt(p2 / 6.0);
    let mut b = a;
    for (i, row) in b.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            if i == j {
                *x -= q;
            }
            *x /= p;
        }
    }
    let r = (det3(&b) / 2.0).clamp(-1.0, 1.0);
    let phi = math::acos(r) / 3.0;
    let hi = q + 2.0 * p * math::cos(phi);
    let lo = q + 2.0 * p * math::cos(phi + 2.0 * math::PI / 3.0);
    let mid = 3.0 * q - hi - lo;

    let isolated = if hi - mid >= mid - lo { hi } else { lo };
    let Some(v) = null_vector(&a, isolated) else {
        return Ok(sorted_desc([hi, mid, lo]));
    };
    let (w1, w2) = complement_basis(&v);
    let lambda = quad(&a, &v, &v);
    let a11 = quad(&a, &w1, &w1);
    let a22 = quad(&a, &w2, &w2);
    let a12 = quad(&a, &w1, &w2);
    let (e1, e2) = eig_hermitian_2x2(a11, a22, a12.abs());
    Ok(sorted_desc([lambda, e1, e2]))
}

fn symmetrized(m: &Real3) -> Real3 {
    let mut a = *m;
    for i in 0..3 {
        for j in (i + 1)..3 {
            let s = 0.5 * (m[i][j] + m[j][i]);
            a[i][j] = s;
            a[j][i] = s;
        }
    }
    a
}

pub(crate) fn det3(m: &Real3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn sorted_desc(mut v: [f64; 3]) -> [f64; 3] {
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm3(v: &[f64; 3]) -> f64 {
    math::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2])
}

fn quad(a: &Real3, x: &[f64; 3], y: &[f64; 3]) -> f64 {
    let mut s = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            s += x[i] * a[i][j] * y[j];
        }
    }
    s
}

/// Unit vector spanning the kernel of `a − λI`, from the best-conditioned
/// cross product of its rows.
fn null_vector(a: &Real3, lambda: f64) -> Option<[f64; 3]> {
    let mut s = *a;
    for (i, row) in s.iter_mut().enumerate() {
        row[i] -= lambda;
    }
    let candidates = [
        cross(&s[0], &s[1]),
        cross(&s[0], &s[2]),
        cross(&s[1], &s[2]),
    ];
    let best = candidates
        .iter()
        .max_by(|x, y| norm3(x).total_cmp(&norm3(y)))?;
    let n = norm3(best);
    if !(n > 0.0) {
        return None;
    }
    Some([best[0] / n, best[1] / n, best[2] / n])
}

fn complement_basis(v: &[f64; 3]) -> ([f64; 3], [f64; 3]) {
    // Cross with the axis least aligned with v.
    let axis = if v[0].abs() <= v[1].abs() && v[0].abs() <= v[2].abs() {
        [1.0, 0.0, 0.0]
    } else if v[1].abs() <= v[2].abs() {
        [0.0, 1.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    let u = cross(v, &axis);
    let n = norm3(&u);
    let w1 = [u[0] / n, u[1] / n, u[2] / n];
    let w2 = cross(v, &w1);
    (w1, w2)
}

fn isqrt(n: usize) -> usize {
    let mut r = math::sqrt(n as f64) as usize;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}
