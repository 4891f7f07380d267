//! Two qubits in a common zero-temperature Lorentzian reservoir.
//!
//! The Lorentzian reservoir is replaced by one damped pseudomode `a`:
//!
//! ```text
//! dρ/dt = −i[H, ρ] + κ (a ρ a† − ½{a†a, ρ}),   H = Ω₀ [(σ₊ᴬ + σ₊ᴮ) a + h.c.]
//! ```
//!
//! in the frame rotating at the (resonant) qubit frequency. With
//! `κ = 2λ` and `Ω₀ = √(Γλ)/2` the collective one-excitation amplitude obeys
//! `c̈ + λċ + (Γλ/2) c = 0`, which is the super-radiant decay law
//! implemented by [`rho_pp_analytic`]. If Γ is instead read as a collective
//! rate, the single-qubit coupling becomes `√(Γλ/2)/2`; only the
//! calibration below changes.
//!
//! The Hamiltonian conserves the total excitation number, so a Fock cutoff
//! `n_max` at least equal to the initial excitation number is exact.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math;
use crate::qmat::{self, ComplexMatrix, DensityMatrix};
use crate::quantifiers::{self, XState};

/// Spontaneous emission rate; the unit of every rate and inverse time here.
pub const GAMMA: f64 = 1.0;
/// Default Fock cutoff, exact for initial states with at most two excitations.
pub const DEFAULT_N_MAX: usize = 2;
/// Default horizon in units of `1/Γ`.
pub const DEFAULT_T_MAX: f64 = 200.0;

/// Population allowed at the Fock cutoff in states that can still emit.
pub const TRUNCATION_TOL: f64 = 1e-10;
/// Per-step trace drift allowed before [`Error::StepTooLarge`].
pub const TRACE_DRIFT_PER_STEP: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Simulation parameters for the pseudomode master equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimParams {
    lambda: f64,
    coupling: f64,
    decay: f64,
    n_max: usize,
    dt: f64,
    t_max: f64,
}

impl SimParams {
    /// Lorentzian reservoir of half-width `lambda` (in units of Γ).
    pub fn lorentzian(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(
                "lambda must be positive and finite",
            ));
        }
        Ok(Self::from_rates(
            lambda,
            math::sqrt(GAMMA * lambda) / 2.0,
            2.0 * lambda,
        ))
    }

    /// Lossless single-mode cavity with per-qubit coupling `omega` (κ = 0).
    pub fn single_mode(omega: f64) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidParameter("omega must be positive and finite"));
        }
        Ok(Self::from_rates(0.0, omega, 0.0))
    }

    fn from_rates(lambda: f64, coupling: f64, decay: f64) -> Self {
        Self {
            lambda,
            coupling,
            decay,
            n_max: DEFAULT_N_MAX,
            dt: default_dt(coupling, decay),
            t_max: DEFAULT_T_MAX,
        }
    }

    pub fn with_n_max(mut self, n_max: usize) -> Self {
        self.n_max = n_max;
        self
    }

    pub fn with_dt(mut self, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter("dt must be positive and finite"));
        }
        self.dt = dt;
        Ok(self)
    }

    pub fn with_t_max(mut self, t_max: f64) -> Result<Self> {
        if !(t_max > 0.0 && t_max.is_finite()) {
            return Err(Error::InvalidParameter("t_max must be positive and finite"));
        }
        self.t_max = t_max;
        Ok(self)
    }

    pub fn gamma(&self) -> f64 {
        GAMMA
    }

    /// Lorentzian half-width λ; zero for a single-mode cavity.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Per-qubit qubit–pseudomode coupling Ω₀.
    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    /// Pseudomode decay rate κ.
    pub fn decay(&self) -> f64 {
        self.decay
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn field_dim(&self) -> usize {
        self.n_max + 1
    }
}

/// `min(0.005 / max(2Ω₀, κ/2), 0.01)`; for a Lorentzian this is
/// `min(0.005 / max(√(Γλ), λ), 0.01)`.
fn default_dt(coupling: f64, decay: f64) -> f64 {
    let rate = (2.0 * coupling).max(decay / 2.0);
    if rate > 0.0 {
        (0.005 / rate).min(0.01)
    } else {
        0.01
    }
}

/// Per-qubit coupling of the lossless single-mode cavity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerfectCavityParams {
    omega: f64,
}

impl PerfectCavityParams {
    pub fn new(omega: f64) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidParameter("omega must be positive and finite"));
        }
        Ok(Self { omega })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Period `2π/(√6 Ω)` of the two-excitation dynamics.
    pub fn period(&self) -> f64 {
        2.0 * math::PI / (math::sqrt(6.0) * self.omega)
    }
}

/// Super-radiant population `ρ₊₊(t)` after starting in `|+⟩`.
///
/// Solves `c̈ + (κ/2)ċ + 2Ω₀²c = 0`, `c(0) = 1`, `ċ(0) = 0`, and returns
/// `c²`. For a Lorentzian this is
/// `e^{−λt}[cos(dt/2) + (λ/d) sin(dt/2)]²`, `d = √(2Γλ − λ²)`, with the
/// hyperbolic continuation for `Γ < λ/2` and the series limit
/// `e^{−λt}(1 + λt/2)²` when `|d| < 10⁻⁶λ`.
pub fn rho_pp_analytic(t: f64, p: &SimParams) -> f64 {
    let damping = p.decay / 4.0;
    let w2 = 2.0 * p.coupling * p.coupling - damping * damping;
    let d = 2.0 * math::sqrt(w2.abs());
    let amp = if d < 1e-6 * (p.decay / 2.0) {
        math::exp(-damping * t) * (1.0 + damping * t)
    } else if w2 > 0.0 {
        let w = d / 2.0;
        math::exp(-damping * t) * (math::cos(w * t) + damping / w * math::sin(w * t))
    } else {
        // cosh + r·sinh split into exponentials to stay finite at large t.
        let w = d / 2.0;
        let r = damping / w;
        0.5 * (1.0 + r) * math::exp((w - damping) * t)
            + 0.5 * (1.0 - r) * math::exp(-(w + damping) * t)
    };
    amp * amp
}

/// Two-qubit state at time `t` after starting in `|+⟩`.
pub fn state_plus(t: f64, p: &SimParams) -> XState {
    x_from_rho_pp(rho_pp_analytic(t, p))
}

/// `ρ₁₁ = ρ₁₄ = 0`, `ρ₂₂ = ρ₃₃ = ρ₂₃ = ρ₊₊/2`, `ρ₄₄ = 1 − ρ₊₊`.
pub fn x_from_rho_pp(rho_pp: f64) -> XState {
    let h = rho_pp / 2.0;
    XState::new_unchecked(0.0, h, h, 1.0 - rho_pp, ZERO, Complex64::new(h, 0.0))
}

/// Two-qubit state at time `t` in a lossless cavity after starting in
/// `(|00⟩ + |11⟩)/√2`.
pub fn perfect_cavity_psi(t: f64, q: &PerfectCavityParams) -> XState {
    let theta = math::sqrt(6.0) * q.omega * t;
    let c14 = (2.0 + math::cos(theta)) / 6.0;
    let s = math::sin(theta);
    let rho_pp = s * s / 6.0;
    let p11 = 2.0 * c14 * c14;
    XState::new_unchecked(
        p11,
        rho_pp / 2.0,
        rho_pp / 2.0,
        1.0 - p11 - rho_pp,
        Complex64::new(c14, 0.0),
        Complex64::new(rho_pp / 2.0, 0.0),
    )
}

/// `⟨−|ρ|−⟩` with `|−⟩ = (|10⟩ − |01⟩)/√2`.
pub fn singlet_population(rho: &DensityMatrix) -> Result<f64> {
    check_two_qubit(rho)?;
    Ok(0.5 * (rho[(1, 1)].re + rho[(2, 2)].re) - rho[(1, 2)].re)
}

/// `⟨+|ρ|+⟩` with `|+⟩ = (|10⟩ + |01⟩)/√2`.
pub fn super_radiant_population(rho: &DensityMatrix) -> Result<f64> {
    check_two_qubit(rho)?;
    Ok(0.5 * (rho[(1, 1)].re + rho[(2, 2)].re) + rho[(1, 2)].re)
}

fn check_two_qubit(rho: &DensityMatrix) -> Result<()> {
    if rho.dim() == 4 {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: 4,
            found: rho.dim(),
        })
    }
}

/// Named two-qubit initial states.
pub mod initial {
    use super::*;

    fn ket(entries: &[(usize, f64)]) -> DensityMatrix {
        let mut v = [ZERO; 4];
        for &(i, a) in entries {
            v[i] = Complex64::new(a, 0.0);
        }
        DensityMatrix::pure(&v).expect("normalisable ket")
    }

    /// `(|00⟩ + |11⟩)/√2`.
    pub fn bell_psi() -> DensityMatrix {
        ket(&[(0, 1.0), (3, 1.0)])
    }

    /// `(|10⟩ + |01⟩)/√2`.
    pub fn super_radiant() -> DensityMatrix {
        ket(&[(1, 1.0), (2, 1.0)])
    }

    /// `(|10⟩ − |01⟩)/√2`.
    pub fn singlet() -> DensityMatrix {
        ket(&[(1, 1.0), (2, -1.0)])
    }

    /// `|00⟩`.
    pub fn ground() -> DensityMatrix {
        ket(&[(3, 1.0)])
    }
}

/// Qubit excitation count of basis index `q` in `{|11⟩,|10⟩,|01⟩,|00⟩}`.
fn qubit_excitations(q: usize) -> usize {
    [2, 1, 1, 0][q]
}

/// Sparse Liouvillian acting on row-major vectorised density matrices.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    hilbert_dim: usize,
    row_start: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

impl Liouvillian {
    pub fn hilbert_dim(&self) -> usize {
        self.hilbert_dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// `out = L[x]`.
    pub fn apply(&self, x: &[Complex64], out: &mut [Complex64]) {
        for (row, o) in out.iter_mut().enumerate() {
            let mut acc = ZERO;
            for k in self.row_start[row]..self.row_start[row + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *o = acc;
        }
    }

    pub fn apply_matrix(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(rho.dim());
        self.apply(rho.as_slice(), out.as_mut_slice());
        out
    }
}

/// Operators on the qubits ⊗ pseudomode space.
fn system_operators(field_dim: usize) -> (ComplexMatrix, ComplexMatrix) {
    let one = Complex64::new(1.0, 0.0);
    // Local qubit basis (|1⟩, |0⟩): σ₊ maps index 1 to index 0.
    let mut sp = ComplexMatrix::zeros(2);
    sp[(0, 1)] = one;
    let i2 = ComplexMatrix::identity(2);
    let i_f = ComplexMatrix::identity(field_dim);
    let mut a = ComplexMatrix::zeros(field_dim);
    for n in 1..field_dim {
        a[(n - 1, n)] = Complex64::new(math::sqrt(n as f64), 0.0);
    }
    let sp_a = qmat::kron(&qmat::kron(&sp, &i2), &i_f);
    let sp_b = qmat::kron(&qmat::kron(&i2, &sp), &i_f);
    let a_full = qmat::kron(&ComplexMatrix::identity(4), &a);
    (&sp_a + &sp_b, a_full)
}

/// Pseudomode Liouvillian for the given parameters.
pub fn build_generator(p: &SimParams) -> Liouvillian {
    let d = 4 * p.field_dim();
    let (collective_sp, a) = system_operators(p.field_dim());
    let coupling = Complex64::new(p.coupling, 0.0);
    let h_half = (&collective_sp * &a).scale(coupling);
    let h = &h_half + &h_half.dagger();
    let number = &a.dagger() * &a;

    let mut entries: BTreeMap<(usize, usize), Complex64> = BTreeMap::new();
    let mut push = |row: usize, col: usize, v: Complex64| {
        *entries.entry((row, col)).or_insert(ZERO) += v;
    };
    let minus_i = Complex64::new(0.0, -1.0);
    let half_kappa = Complex64::new(-0.5 * p.decay, 0.0);
    // (A ρ B)_{ik} = Σ A_ij ρ_jl B_lk  →  entry ((i,k), (j,l)) = A_ij B_lk.
    for (i, j, v) in h.nonzeros() {
        for k in 0..d {
            push(i * d + k, j * d + k, minus_i * v);
            push(k * d + j, k * d + i, -minus_i * v);
        }
    }
    if p.decay > 0.0 {
        let kappa = Complex64::new(p.decay, 0.0);
        for (i, j, x) in a.nonzeros() {
            for (k, l, y) in a.nonzeros() {
                // B = a†: B_lk = conj(a_kl).
                push(i * d + k, j * d + l, kappa * x * y.conj());
            }
        }
        for (i, j, v) in number.nonzeros() {
            for k in 0..d {
                push(i * d + k, j * d + k, half_kappa * v);
                push(k * d + j, k * d + i, half_kappa * v);
            }
        }
    }

    let n = d * d;
    let mut row_start = vec![0usize; n + 1];
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    for ((row, col), v) in entries {
        if v == ZERO {
            continue;
        }
        row_start[row + 1] += 1;
        cols.push(col);
        vals.push(v);
    }
    for r in 0..n {
        row_start[r + 1] += row_start[r];
    }
    Liouvillian {
        hilbert_dim: d,
        row_start,
        cols,
        vals,
    }
}

/// One reduced two-qubit state on the output grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolvedState {
    pub t: f64,
    pub rho: DensityMatrix,
    /// `|Tr ρ_total − 1|`.
    pub trace_error: f64,
}

/// Fixed-step RK4 propagation of the full qubits ⊗ pseudomode state.
#[derive(Debug, Clone)]
pub struct Propagator {
    generator: Liouvillian,
    params: SimParams,
    state: Vec<Complex64>,
    scratch: [Vec<Complex64>; 5],
    t: f64,
    steps: usize,
}

impl Propagator {
    /// Starts from `rho0 ⊗ |0⟩⟨0|`.
    pub fn new(rho0: &DensityMatrix, params: &SimParams) -> Result<Self> {
        if rho0.dim() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                found: rho0.dim(),
            });
        }
        let excitations = (0..4)
            .filter(|&q| rho0[(q, q)].re > 0.0)
            .map(qubit_excitations)
            .max()
            .unwrap_or(0);
        if params.n_max < excitations {
            return Err(Error::InsufficientCutoff {
                n_max: params.n_max,
                excitations,
            });
        }
        let nf = params.field_dim();
        let mut vacuum = ComplexMatrix::zeros(nf);
        vacuum[(0, 0)] = Complex64::new(1.0, 0.0);
        let full = qmat::kron(rho0.matrix(), &vacuum);
        let len = full.as_slice().len();
        Ok(Self {
            generator: build_generator(params),
            params: *params,
            state: full.as_slice().to_vec(),
            scratch: core::array::from_fn(|_| vec![ZERO; len]),
            t: 0.0,
            steps: 0,
        })
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn generator(&self) -> &Liouvillian {
        &self.generator
    }

    /// Full state, row-major.
    pub fn full_state(&self) -> ComplexMatrix {
        ComplexMatrix::from_row_major(self.state.clone()).expect("square state")
    }

    /// Integrates to `t` with the largest step `≤ dt` that lands on `t` exactly.
    pub fn advance_to(&mut self, t: f64) -> Result<()> {
        let span = t - self.t;
        if span < 0.0 {
            return Err(Error::InvalidParameter("time grid must be ascending"));
        }
        if span == 0.0 {
            return Ok(());
        }
        let n = math::ceil(span / self.params.dt - 1e-9).max(1.0) as usize;
        let h = span / n as f64;
        for _ in 0..n {
            self.rk4_step(h);
        }
        self.t = t;
        self.steps += n;
        Ok(())
    }

    fn rk4_step(&mut self, h: f64) {
        let [k1, k2, k3, k4, tmp] = &mut self.scratch;
        let x = &self.state;
        self.generator.apply(x, k1);
        for i in 0..x.len() {
            tmp[i] = x[i] + k1[i] * (0.5 * h);
        }
        self.generator.apply(tmp, k2);
        for i in 0..x.len() {
            tmp[i] = x[i] + k2[i] * (0.5 * h);
        }
        self.generator.apply(tmp, k3);
        for i in 0..x.len() {
            tmp[i] = x[i] + k3[i] * h;
        }
        self.generator.apply(tmp, k4);
        let w = h / 6.0;
        for i in 0..self.state.len() {
            self.state[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * w;
        }
    }

    pub fn trace_error(&self) -> f64 {
        let d = self.generator.hilbert_dim;
        let tr: Complex64 = (0..d).map(|i| self.state[i * d + i]).sum();
        (tr - Complex64::new(1.0, 0.0)).norm()
    }

    /// Population at the Fock cutoff in states with at least one excited qubit.
    pub fn cutoff_population(&self) -> f64 {
        let nf = self.params.field_dim();
        let d = self.generator.hilbert_dim;
        (0..3)
            .map(|q| {
                let idx = q * nf + self.params.n_max;
                self.state[idx * d + idx].re
            })
            .sum()
    }

    /// Expectation of the total excitation number `Σσ₊σ₋ + a†a`.
    pub fn excitation_number(&self) -> f64 {
        let nf = self.params.field_dim();
        let d = self.generator.hilbert_dim;
        (0..d)
            .map(|idx| {
                let (q, n) = (idx / nf, idx % nf);
                (qubit_excitations(q) + n) as f64 * self.state[idx * d + idx].re
            })
            .sum()
    }

    /// Reduced two-qubit state, validated as a density matrix.
    pub fn reduced(&self) -> Result<DensityMatrix> {
        let reduced = qmat::partial_trace_field(&self.full_state(), 4, self.params.field_dim())?;
        DensityMatrix::new(reduced)
    }

    fn check_health(&self) -> Result<()> {
        let drift = self.trace_error();
        if drift > TRACE_DRIFT_PER_STEP * (self.steps.max(1) as f64) {
            return Err(Error::StepTooLarge {
                drift,
                steps: self.steps,
            });
        }
        let cutoff = self.cutoff_population();
        if cutoff > TRUNCATION_TOL {
            return Err(Error::TruncationError(cutoff));
        }
        Ok(())
    }
}

/// Evolves `rho0 ⊗ vacuum` and returns the reduced state at each grid time.
///
/// The grid must start at 0 and be non-decreasing.
pub fn evolve(rho0: &DensityMatrix, p: &SimParams, t_grid: &[f64]) -> Result<Vec<EvolvedState>> {
    match t_grid.first() {
        Some(&t0) if t0 == 0.0 => {}
        _ => return Err(Error::InvalidParameter("time grid must start at 0")),
    }
    if t_grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidParameter("time grid must be finite"));
    }
    let mut prop = Propagator::new(rho0, p)?;
    let mut out = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        prop.advance_to(t)?;
        prop.check_health()?;
        out.push(EvolvedState {
            t,
            rho: prop.reduced()?,
            trace_error: prop.trace_error(),
        });
    }
    Ok(out)
}

/// Integrator hygiene over a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hygiene {
    pub max_trace_error: f64,
    pub min_eigenvalue: f64,
    pub max_x_leakage: f64,
    /// `max − min` of the singlet population along the run.
    pub singlet_spread: f64,
}

impl Hygiene {
    pub fn of(states: &[EvolvedState]) -> Self {
        let mut h = Hygiene {
            max_trace_error: 0.0,
            min_eigenvalue: f64::INFINITY,
            max_x_leakage: 0.0,
            singlet_spread: 0.0,
        };
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for s in states {
            h.max_trace_error = h.max_trace_error.max(s.trace_error);
            h.min_eigenvalue = h.min_eigenvalue.min(s.rho.min_eigenvalue());
            h.max_x_leakage = h.max_x_leakage.max(qmat::off_x_magnitude(s.rho.matrix()));
            if let Ok(sp) = singlet_population(&s.rho) {
                lo = lo.min(sp);
                hi = hi.max(sp);
            }
        }
        if hi >= lo {
            h.singlet_spread = hi - lo;
        }
        h
    }

    /// Trace drift ≤ 1e-9, eigenvalues ≥ −1e-8, off-X ≤ 1e-10, singlet within 1e-9.
    pub fn passes(&self) -> bool {
        self.max_trace_error <= 1e-9
            && self.min_eigenvalue >= -1e-8
            && self.max_x_leakage <= quantifiers::X_TOL
            && self.singlet_spread <= 1e-9
    }
}
