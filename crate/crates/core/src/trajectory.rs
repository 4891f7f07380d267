//! C–P–B triplets along dynamical runs, B > 2 branches, closed relations
//! and entanglement-ordering inversions.

use alloc::vec::Vec;

use crate::dynamics::{
    self, initial, singlet_population, super_radiant_population, EvolvedState, Hygiene,
    PerfectCavityParams, SimParams,
};
use crate::error::{Error, Result};
use crate::qmat::DensityMatrix;
use crate::quantifiers::{cpb_triplet, CpbTriplet};

/// Default number of samples on `[0, 200/Γ]`.
pub const DEFAULT_SAMPLES: usize = 4000;
/// Separation required on both C and B for an ordering inversion.
pub const INVERSION_EPS: f64 = 1e-6;
/// At most this many inversion pairs are reported.
pub const INVERSION_CAP: usize = 1000;
/// The classical CHSH bound.
pub const CLASSICAL_BOUND: f64 = 2.0;

/// Initial condition plus environment.
#[derive(Debug, Clone, PartialEq)]
pub enum Scenario {
    /// `(|00⟩ + |11⟩)/√2` in a lossy cavity.
    PsiLossy(SimParams),
    /// `(|10⟩ + |01⟩)/√2` in a lossy cavity.
    PlusLossy(SimParams),
    /// `(|00⟩ + |11⟩)/√2` in a lossless single-mode cavity.
    PsiPerfect(PerfectCavityParams),
    Custom {
        initial: DensityMatrix,
        params: SimParams,
    },
}

impl Scenario {
    pub fn initial_state(&self) -> DensityMatrix {
        match self {
            Scenario::PsiLossy(_) | Scenario::PsiPerfect(_) => initial::bell_psi(),
            Scenario::PlusLossy(_) => initial::super_radiant(),
            Scenario::Custom { initial, .. } => initial.clone(),
        }
    }

    pub fn params(&self) -> Result<SimParams> {
        match self {
            Scenario::PsiLossy(p) | Scenario::PlusLossy(p) => Ok(*p),
            Scenario::PsiPerfect(q) => SimParams::single_mode(q.omega()),
            Scenario::Custom { params, .. } => Ok(*params),
        }
    }

    /// Reduced states on `t_grid`.
    pub fn evolve(&self, t_grid: &[f64]) -> Result<Vec<EvolvedState>> {
        dynamics::evolve(&self.initial_state(), &self.params()?, t_grid)
    }
}

/// `samples` equally spaced times from 0 to `t_max` inclusive.
pub fn uniform_grid(t_max: f64, samples: usize) -> Result<Vec<f64>> {
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::InvalidParameter("t_max must be positive and finite"));
    }
    if samples < 2 {
        return Err(Error::InvalidParameter("at least two samples are required"));
    }
    let last = (samples - 1) as f64;
    Ok((0..samples).map(|k| t_max * k as f64 / last).collect())
}

/// Quantifiers of one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRecord {
    pub t: f64,
    pub triplet: CpbTriplet,
    /// `⟨+|ρ|+⟩`.
    pub rho_pp: f64,
    /// `⟨−|ρ|−⟩`.
    pub singlet_pop: f64,
    pub trace_err: f64,
}

impl TrajectoryRecord {
    pub fn from_state(s: &EvolvedState) -> Result<Self> {
        Ok(Self {
            t: s.t,
            triplet: cpb_triplet(&s.rho)?,
            rho_pp: super_radiant_population(&s.rho)?,
            singlet_pop: singlet_population(&s.rho)?,
            trace_err: s.trace_error,
        })
    }
}

pub fn records_from_states(states: &[EvolvedState]) -> Result<Vec<TrajectoryRecord>> {
    states.iter().map(TrajectoryRecord::from_state).collect()
}

/// A sampled run with its integrator hygiene.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub records: Vec<TrajectoryRecord>,
    pub hygiene: Hygiene,
}

pub fn sample_trajectory(scenario: &Scenario, t_grid: &[f64]) -> Result<Trajectory> {
    let states = scenario.evolve(t_grid)?;
    Ok(Trajectory {
        records: records_from_states(&states)?,
        hygiene: Hygiene::of(&states),
    })
}

/// A maximal interval with `B > threshold`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Branch {
    /// 1-based ordinal.
    pub index: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub b_peak: f64,
    pub t_peak: f64,
    /// The branch is already above threshold at the first sample.
    pub open_start: bool,
    /// The branch is still above threshold at the last sample.
    pub open_end: bool,
}

impl Branch {
    pub fn duration(&self) -> f64 {
        self.t_end - self.t_start
    }
}

pub fn detect_branches(records: &[TrajectoryRecord], threshold: f64) -> Result<Vec<Branch>> {
    let t: Vec<f64> = records.iter().map(|r| r.t).collect();
    let b: Vec<f64> = records.iter().map(|r| r.triplet.b).collect();
    detect_branches_series(&t, &b, threshold)
}

/// Branches of a sampled `B(t)`; crossings are linearly interpolated.
pub fn detect_branches_series(t: &[f64], b: &[f64], threshold: f64) -> Result<Vec<Branch>> {
    if t.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: t.len(),
            found: b.len(),
        });
    }
    if t.len() < 2 {
        return Err(Error::InvalidParameter(
            "branch detection needs at least two samples",
        ));
    }
    let crossing = |i: usize| {
        let (b0, b1) = (b[i - 1], b[i]);
        t[i - 1] + (threshold - b0) / (b1 - b0) * (t[i] - t[i - 1])
    };
    let mut out = Vec::new();
    let mut current: Option<Branch> = None;
    for i in 0..t.len() {
        let above = b[i] > threshold;
        match (&mut current, above) {
            (None, true) => {
                let open_start = i == 0;
                current = Some(Branch {
                    index: out.len() + 1,
                    t_start: if open_start { t[0] } else { crossing(i) },
                    t_end: t[i],
                    b_peak: b[i],
                    t_peak: t[i],
                    open_start,
                    open_end: false,
                });
            }
            (Some(br), true) => {
                if b[i] > br.b_peak {
                    br.b_peak = b[i];
                    br.t_peak = t[i];
                }
            }
            (Some(br), false) => {
                br.t_end = crossing(i);
                out.push(*br);
                current = None;
            }
            (None, false) => {}
        }
    }
    if let Some(mut br) = current {
        br.t_end = t[t.len() - 1];
        br.open_end = true;
        out.push(br);
    }
    Ok(out)
}

/// Closed C–P–B relations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// `B²/4 − P − C² = −(1 − C)²`.
    SuperRadiant,
    /// `B²/4 = 1 + C²` with `P = 1`.
    Pure,
}

impl Relation {
    pub fn residual(self, t: &CpbTriplet) -> f64 {
        let lhs = t.b * t.b / 4.0 - t.p - t.c * t.c;
        match self {
            Relation::SuperRadiant => {
                let q = 1.0 - t.c;
                (lhs + q * q).abs()
            }
            Relation::Pure => (t.b * t.b / 4.0 - 1.0 - t.c * t.c).abs(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelationReport {
    pub max_residual: f64,
    /// Index of the worst sample within the checked sequence.
    pub worst: Option<usize>,
    pub samples: usize,
    /// `samples > 0` and `max_residual ≤ tol`.
    pub holds: bool,
}

pub fn check_closed_relation<'a>(
    records: impl IntoIterator<Item = &'a TrajectoryRecord>,
    relation: Relation,
    tol: f64,
) -> RelationReport {
    let mut report = RelationReport {
        max_residual: 0.0,
        worst: None,
        samples: 0,
        holds: false,
    };
    for (i, r) in records.into_iter().enumerate() {
        let res = relation.residual(&r.triplet);
        if report.worst.is_none() || !(res <= report.max_residual) {
            report.max_residual = res;
            report.worst = Some(i);
        }
        report.samples += 1;
    }
    report.holds = report.samples > 0 && report.max_residual <= tol;
    report
}

/// Pairs `(i, j)` with `Cᵢ > Cⱼ + ε` and `Bᵢ < Bⱼ − ε`.
pub fn detect_ordering_inversions(records: &[TrajectoryRecord]) -> Vec<(usize, usize)> {
    let cb: Vec<(f64, f64)> = records.iter().map(|r| (r.triplet.c, r.triplet.b)).collect();
    ordering_inversions(&cb)
}

/// [`detect_ordering_inversions`] on bare `(C, B)` pairs.
pub fn ordering_inversions(cb: &[(f64, f64)]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (i, &(ci, bi)) in cb.iter().enumerate() {
        for (j, &(cj, bj)) in cb.iter().enumerate() {
            if ci > cj + INVERSION_EPS && bi < bj - INVERSION_EPS {
                out.push((i, j));
                if out.len() == INVERSION_CAP {
                    return out;
                }
            }
        }
    }
    out
}
