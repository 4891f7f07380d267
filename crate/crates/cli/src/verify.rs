//! Seeded invariant suites behind `cpb verify`.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};
use std::fmt;
use std::str::FromStr;
use std::thread;

use cpb_core::dynamics::{self, initial, rho_pp_analytic, Hygiene, SimParams};
use cpb_core::mems::{boundary_violations, is_mems_trajectory, mems_cpb, mems_state, MemsParam};
use cpb_core::qmat::{self, eigvals_sym3, kron, ComplexMatrix};
use cpb_core::quantifiers::{
    bell_max_bruteforce, bell_max_horodecki, bell_max_x, classify_region, concurrence_block_oracle,
    concurrence_x, cpb_from_x,
};
use cpb_core::sample::{random_pure_x_state, random_x_state, rng, SeededRng};
use cpb_core::trajectory::{
    check_closed_relation, detect_branches, detect_ordering_inversions, sample_trajectory,
    uniform_grid, Relation, Scenario,
};
use cpb_core::{Complex64, DensityMatrix, Region, XState};
use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Qmat,
    Quantifiers,
    Dynamics,
    Mems,
    Trajectory,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Qmat,
        Suite::Quantifiers,
        Suite::Dynamics,
        Suite::Mems,
        Suite::Trajectory,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Qmat => "qmat",
            Suite::Quantifiers => "quantifiers",
            Suite::Dynamics => "dynamics",
            Suite::Mems => "mems",
            Suite::Trajectory => "trajectory",
        }
    }

    fn run(self, seed: u64) -> Vec<Check> {
        let mut c = Checks::new(self.name());
        match self {
            Suite::Qmat => qmat_suite(&mut c, seed),
            Suite::Quantifiers => quantifiers_suite(&mut c, seed),
            Suite::Dynamics => dynamics_suite(&mut c, seed),
            Suite::Mems => mems_suite(&mut c, seed),
            Suite::Trajectory => trajectory_suite(&mut c),
        }
        c.0
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| format!("unknown suite '{s}'"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

struct Checks(Vec<Check>, &'static str);

impl Checks {
    fn new(suite: &'static str) -> Self {
        Self(Vec::new(), suite)
    }

    fn add(&mut self, name: &'static str, pass: bool, detail: String) {
        self.0.push(Check {
            suite: self.1,
            name,
            pass,
            detail,
        });
    }

    /// Passes when `value ≤ tol`.
    fn bound(&mut self, name: &'static str, value: f64, tol: f64) {
        self.add(name, value <= tol, format!("{value:.3e} <= {tol:.0e}"));
    }

    /// Records a failure instead of aborting the suite.
    fn guard<T>(&mut self, name: &'static str, r: cpb_core::Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.add(name, false, e.to_string());
                None
            }
        }
    }
}

/// Runs the suites on worker threads; checks are returned in suite order.
pub fn run_suites(suites: &[Suite], seed: u64) -> Vec<Check> {
    thread::scope(|s| {
        let handles: Vec<_> = suites
            .iter()
            .map(|&suite| (suite, s.spawn(move || suite.run(seed))))
            .collect();
        handles
            .into_iter()
            .flat_map(|(suite, h)| {
                h.join().unwrap_or_else(|_| {
                    vec![Check {
                        suite: suite.name(),
                        name: "suite",
                        pass: false,
                        detail: "panicked".into(),
                    }]
                })
            })
            .collect()
    })
}

pub fn render_table(checks: &[Check]) -> String {
    let w_suite = checks
        .iter()
        .map(|c| c.suite.len())
        .max()
        .unwrap_or(5)
        .max(5);
    let w_name = checks
        .iter()
        .map(|c| c.name.len())
        .max()
        .unwrap_or(5)
        .max(5);
    let mut out = format!(
        "{:<w_suite$}  {:<w_name$}  result  detail\n",
        "suite", "check"
    );
    for c in checks {
        out += &format!(
            "{:<w_suite$}  {:<w_name$}  {:<6}  {}\n",
            c.suite,
            c.name,
            if c.pass { "PASS" } else { "FAIL" },
            c.detail
        );
    }
    out
}

fn random_matrix(r: &mut SeededRng, dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, |_, _| {
        Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))
    })
}

fn random_rotation(r: &mut SeededRng) -> [[f64; 3]; 3] {
    let mut q = [0.0f64; 4];
    loop {
        for x in &mut q {
            *x = r.gen_range(-1.0..1.0);
        }
        let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-3 {
            q.iter_mut().for_each(|x| *x /= n);
            break;
        }
    }
    let [w, x, y, z] = q;
    [
        [
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
        ],
        [
            2.0 * (x * y + w * z),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - w * x),
        ],
        [
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
        ],
    ]
}

fn qmat_suite(c: &mut Checks, seed: u64) {
    let mut r = rng(seed);
    let mut assoc = 0.0_f64;
    for _ in 0..50 {
        let (a, b, d) = (
            random_matrix(&mut r, 2),
            random_matrix(&mut r, 3),
            random_matrix(&mut r, 2),
        );
        let lhs = kron(&kron(&a, &b), &d);
        let rhs = kron(&a, &kron(&b, &d));
        assoc = assoc.max((&lhs - &rhs).max_abs());
    }
    c.bound("kron associativity", assoc, 1e-12);

    let mut ptrace = 0.0_f64;
    for _ in 0..100 {
        let q = random_x_state(&mut r).to_matrix();
        let w: f64 = r.gen();
        let field = ComplexMatrix::from_real_diagonal(&[w, (1.0 - w) / 2.0, (1.0 - w) / 2.0]);
        let Some(red) = c.guard(
            "partial trace",
            qmat::partial_trace_field(&kron(&q, &field), 4, 3),
        ) else {
            return;
        };
        ptrace = ptrace.max((&red - &q).max_abs());
    }
    c.bound("partial trace of products", ptrace, 1e-14);

    let mut spectrum = 0.0_f64;
    for _ in 0..500 {
        let mut d = [
            r.gen_range(-1.0..1.0),
            r.gen_range(-1.0..1.0),
            r.gen_range(-1.0..1.0),
        ];
        let q = random_rotation(&mut r);
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = (0..3).map(|k| q[k][i] * d[k] * q[k][j]).sum();
            }
        }
        // Exact symmetry so the symmetry gate is not what is tested.
        for i in 0..3 {
            for j in 0..i {
                m[i][j] = m[j][i];
            }
        }
        d.sort_by(|a, b| b.total_cmp(a));
        let Some(e) = c.guard("symmetric 3x3 spectrum", eigvals_sym3(&m)) else {
            return;
        };
        for k in 0..3 {
            spectrum = spectrum.max((e[k] - d[k]).abs());
        }
    }
    c.bound("symmetric 3x3 spectrum", spectrum, 1e-10);
}

fn quantifiers_suite(c: &mut Checks, seed: u64) {
    let mut r = rng(seed.wrapping_add(1));
    let (mut ident, mut conc) = (0.0_f64, 0.0_f64);
    let mut hits = [0usize; 4];
    for _ in 0..10_000 {
        let s = random_x_state(&mut r);
        let Some(t) = c.guard("remainder identity", cpb_from_x(&s)) else {
            return;
        };
        ident = ident.max(t.identity_residual());
        conc = conc.max((concurrence_x(&s) - concurrence_block_oracle(&s)).abs());
        hits[classify_region(&s).index() as usize - 1] += 1;
    }
    c.bound("remainder identity", ident, 1e-9);
    c.bound("concurrence vs Wootters blocks", conc, 1e-10);
    c.add(
        "region coverage",
        hits.iter().all(|&h| h >= 100),
        format!("{hits:?}"),
    );

    let mut pure = 0.0_f64;
    for _ in 0..1000 {
        let s = random_pure_x_state(&mut r);
        let Some(t) = c.guard("pure-state relation", cpb_from_x(&s)) else {
            return;
        };
        pure = pure.max((t.b - 2.0 * (1.0 + t.c * t.c).sqrt()).abs());
    }
    c.bound("pure-state relation", pure, 1e-9);

    let mut horo = 0.0_f64;
    let mut densities = Vec::new();
    for _ in 0..1000 {
        let s = random_x_state(&mut r);
        let Some(rho) = c.guard("closed form vs Horodecki", s.to_density()) else {
            return;
        };
        let Some(h) = c.guard("closed form vs Horodecki", bell_max_horodecki(&rho)) else {
            return;
        };
        horo = horo.max((bell_max_x(&s).0 - h).abs());
        if densities.len() < 8 {
            densities.push((rho, h));
        }
    }
    c.bound("closed form vs Horodecki", horo, 1e-10);

    let (mut short, mut excess) = (0.0_f64, f64::NEG_INFINITY);
    for (k, (rho, h)) in densities.iter().enumerate() {
        let Some(b) = c.guard(
            "brute-force CHSH",
            bell_max_bruteforce(rho, 32, seed.wrapping_add(k as u64)),
        ) else {
            return;
        };
        short = short.max(h - b);
        excess = excess.max(b - h);
    }
    c.add(
        "brute-force CHSH bracket",
        short <= 1e-4 && excess <= 1e-12,
        format!("shortfall {short:.3e}, excess {excess:.3e}"),
    );

    let mut phase = 0.0_f64;
    for _ in 0..1000 {
        let s = random_x_state(&mut r);
        let (a, b) = (r.gen_range(0.0..6.3), r.gen_range(0.0..6.3));
        let rotated = XState {
            c14: s.c14 * Complex64::from_polar(1.0, a),
            c23: s.c23 * Complex64::from_polar(1.0, b),
            ..s
        };
        let (Ok(t0), Ok(t1)) = (cpb_from_x(&s), cpb_from_x(&rotated)) else {
            c.add("local phase invariance", false, "quantifier error".into());
            return;
        };
        for d in [t0.c - t1.c, t0.p - t1.p, t0.b - t1.b, t0.r - t1.r] {
            phase = phase.max(d.abs());
        }
    }
    c.bound("local phase invariance", phase, 1e-12);
}

fn dynamics_suite(c: &mut Checks, seed: u64) {
    let Some(p) = c.guard("parameters", SimParams::lorentzian(1e-2)) else {
        return;
    };
    let grid: Vec<f64> = (0..=200).map(|k| k as f64 * 0.25).collect();
    let Some(states) = c.guard(
        "super-radiant decay",
        dynamics::evolve(&initial::super_radiant(), &p, &grid),
    ) else {
        return;
    };
    let mut dev = 0.0_f64;
    for s in &states {
        if let Ok(pp) = dynamics::super_radiant_population(&s.rho) {
            dev = dev.max((pp - rho_pp_analytic(s.t, &p)).abs());
        }
    }
    c.bound("super-radiant decay", dev, 1e-6);
    hygiene(c, "hygiene, |+>", &states);

    let Some(states) = c.guard(
        "ground state",
        dynamics::evolve(&initial::ground(), &p, &grid),
    ) else {
        return;
    };
    let moved = states
        .iter()
        .map(|s| (s.rho.matrix() - initial::ground().matrix()).max_abs())
        .fold(0.0, f64::max);
    c.bound("ground state is stationary", moved, 0.0);

    let mut r = rng(seed.wrapping_add(2));
    let mixed = random_x_state(&mut r).to_matrix();
    let singlet = initial::singlet().into_matrix();
    let w: f64 = r.gen_range(0.1..0.9);
    let m = &mixed.scale(Complex64::new(w, 0.0)) + &singlet.scale(Complex64::new(1.0 - w, 0.0));
    let Some(rho) = c.guard("hygiene, random X state", DensityMatrix::new(m)) else {
        return;
    };
    let Some(states) = c.guard("hygiene, random X state", dynamics::evolve(&rho, &p, &grid)) else {
        return;
    };
    hygiene(c, "hygiene, random X state", &states);
}

fn hygiene(c: &mut Checks, name: &'static str, states: &[dynamics::EvolvedState]) {
    let h = Hygiene::of(states);
    c.add(
        name,
        h.passes(),
        format!(
            "trace {:.1e}, min eig {:.1e}, off-X {:.1e}, singlet spread {:.1e}",
            h.max_trace_error, h.min_eigenvalue, h.max_x_leakage, h.singlet_spread
        ),
    );
}

fn mems_suite(c: &mut Checks, seed: u64) {
    let (mut agree, mut bad_region) = (0.0_f64, 0);
    for k in 0..1000 {
        let Some(g) = c.guard("closed forms vs generic", MemsParam::new(k as f64 / 999.0)) else {
            return;
        };
        let closed = mems_cpb(g);
        let Some(generic) = c.guard("closed forms vs generic", cpb_from_x(&mems_state(g))) else {
            return;
        };
        for d in [
            closed.c - generic.c,
            closed.p - generic.p,
            closed.b - generic.b,
            closed.r - generic.r,
        ] {
            agree = agree.max(d.abs());
        }
        if matches!(generic.region, Region::R2 | Region::R4)
            || matches!(closed.region, Region::R2 | Region::R4)
        {
            bad_region += 1;
        }
    }
    c.bound("closed forms vs generic", agree, 1e-10);
    c.add(
        "regions 2 and 4 excluded",
        bad_region == 0,
        format!("{bad_region} hits"),
    );

    let mut lower = 0.0_f64;
    for k in 1..=500 {
        let y = FRAC_1_SQRT_2 + (1.0 - FRAC_1_SQRT_2) * k as f64 / 500.0;
        if let Ok(g) = MemsParam::new(y) {
            let t = mems_cpb(g);
            lower = lower.max((t.b - 2.0 * SQRT_2 * t.c).abs());
        }
    }
    c.bound("violation at the lower bound", lower, 1e-10);
    let edge = MemsParam::new(FRAC_1_SQRT_2).map(|g| mems_cpb(g).b - 2.0);
    c.bound(
        "B = 2 at 1/sqrt2",
        edge.map_or(f64::INFINITY, f64::abs),
        1e-9,
    );

    let mut r = rng(seed.wrapping_add(3));
    let states: Vec<XState> = (0..20_000)
        .map(|_| random_x_state(&mut r))
        .filter(|s| concurrence_x(s) > 0.0)
        .collect();
    let bad = boundary_violations(&states, 1e-12);
    let detail = match bad.first() {
        Some(v) => format!(
            "{} of {} below the curve, e.g. C={:.6} P={:.6}",
            bad.len(),
            states.len(),
            v.c,
            v.p
        ),
        None => format!("{} entangled states on or above the curve", states.len()),
    };
    c.add("C-P boundary", bad.is_empty(), detail);

    let Some(p) = c.guard("parameters", SimParams::lorentzian(1e-3)) else {
        return;
    };
    let traj: Vec<XState> = (0..400)
        .map(|k| dynamics::state_plus(k as f64 * 0.5, &p))
        .collect();
    let report = is_mems_trajectory(&traj, 1e-12);
    let counted = report.samples.iter().filter(|s| s.counted).count();
    c.add(
        "|+> dynamics stays on MEMS",
        report.verdict,
        format!("{counted} counted samples"),
    );
}

fn trajectory_suite(c: &mut Checks) {
    let (Ok(grid), Ok(slow), Ok(fast)) = (
        uniform_grid(200.0, 4000),
        SimParams::lorentzian(1e-3),
        SimParams::lorentzian(1e-2),
    ) else {
        c.add("setup", false, "invalid parameters".into());
        return;
    };

    let Some(plus) = c.guard(
        "|+> closed relation",
        sample_trajectory(&Scenario::PlusLossy(slow), &grid),
    ) else {
        return;
    };
    let upper: Vec<_> = plus
        .records
        .iter()
        .copied()
        .filter(|r| r.rho_pp >= 1.0 / 3.0)
        .collect();
    let rel = check_closed_relation(&upper, Relation::SuperRadiant, 1e-8);
    c.add(
        "|+> closed relation",
        rel.holds,
        format!(
            "residual {:.3e} over {} samples",
            rel.max_residual, rel.samples
        ),
    );
    let inv = detect_ordering_inversions(&upper);
    c.add(
        "|+> ordering preserved",
        inv.is_empty(),
        format!("{} inversions", inv.len()),
    );

    let Some(psi) = c.guard(
        "|Psi> branches",
        sample_trajectory(&Scenario::PsiLossy(slow), &grid),
    ) else {
        return;
    };
    let Some(branches) = c.guard("|Psi> branches", detect_branches(&psi.records, 2.0)) else {
        return;
    };
    c.add(
        "|Psi> branches",
        branches.len() >= 3,
        format!("{} branches", branches.len()),
    );
    let rel = check_closed_relation(&psi.records, Relation::SuperRadiant, 1e-8);
    c.add(
        "|Psi> has no closed relation",
        !rel.holds,
        format!("residual {:.3e}", rel.max_residual),
    );

    let Some(fast_run) = c.guard(
        "|Psi> ordering inversions",
        sample_trajectory(&Scenario::PsiLossy(fast), &grid),
    ) else {
        return;
    };
    let inv = detect_ordering_inversions(&fast_run.records);
    c.add(
        "|Psi> ordering inversions",
        !inv.is_empty(),
        format!("{} pairs (capped)", inv.len()),
    );
    let all_clean = [&plus.hygiene, &psi.hygiene, &fast_run.hygiene]
        .iter()
        .all(|h| h.passes());
    c.add("hygiene", all_clean, "three 4000-sample runs".into());
}
