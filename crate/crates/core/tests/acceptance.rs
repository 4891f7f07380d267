//! Acceptance criteria 1–9. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use cpb_core::dynamics::{
    self, initial, perfect_cavity_psi, rho_pp_analytic, Hygiene, PerfectCavityParams, SimParams,
};
use cpb_core::mems::{mems_cpb, mems_state, MemsParam};
use cpb_core::quantifiers::{
    self, bell_max_bruteforce, bell_max_horodecki, bell_max_x, concurrence_block_oracle,
    cpb_from_x, cpb_triplet, remainder, Region, BRUTEFORCE_RESTARTS,
};
use cpb_core::sample::{random_pure_x_state, random_x_state, rng};
use cpb_core::trajectory::{
    check_closed_relation, detect_branches, detect_branches_series, detect_ordering_inversions,
    records_from_states, uniform_grid, Relation, TrajectoryRecord,
};

const SEED: u64 = 20_240_917;
const T_MAX: f64 = 200.0;
const SAMPLES: usize = 4000;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn criterion_1() -> Outcome {
    let mut r = rng(SEED);
    let mut worst = 0.0_f64;
    for _ in 0..1000 {
        let s = random_pure_x_state(&mut r);
        let t = cpb_triplet(&s.to_density().unwrap()).unwrap();
        worst = worst.max((t.b - 2.0 * (1.0 + t.c * t.c).sqrt()).abs());
    }
    outcome(
        worst <= 1e-9,
        format!("max |B - 2sqrt(1+C^2)| = {worst:.3e}"),
    )
}

fn criterion_2() -> Outcome {
    // B, C and P from routes independent of the X closed forms.
    let mut r = rng(SEED + 1);
    let mut worst = 0.0_f64;
    let mut hits = [0usize; 4];
    for _ in 0..10_000 {
        let s = random_x_state(&mut r);
        let rho = s.to_density().unwrap();
        let b = bell_max_horodecki(&rho).unwrap();
        let c = concurrence_block_oracle(&s);
        let p = rho.purity();
        let res = (b * b / 4.0 - p - c * c - remainder(&s)).abs();
        worst = worst.max(res);
        hits[quantifiers::classify_region(&s).index() as usize - 1] += 1;
    }
    let pass = worst <= 1e-9 && hits.iter().all(|&h| h >= 100);
    outcome(
        pass,
        format!("max residual = {worst:.3e}, region hits = {hits:?}"),
    )
}

fn criterion_3() -> Outcome {
    let mut r = rng(SEED + 2);
    let states: Vec<_> = (0..200).map(|_| random_x_state(&mut r)).collect();
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let chunk = states.len().div_ceil(workers);
    // (shortfall, excess, closed-form gap) per state.
    let gaps: Vec<[f64; 3]> = std::thread::scope(|scope| {
        let handles: Vec<_> = states
            .chunks(chunk)
            .enumerate()
            .map(|(c, part)| {
                scope.spawn(move || {
                    part.iter()
                        .enumerate()
                        .map(|(i, s)| {
                            let rho = s.to_density().unwrap();
                            let horo = bell_max_horodecki(&rho).unwrap();
                            let seed = SEED + (c * chunk + i) as u64;
                            let brute =
                                bell_max_bruteforce(&rho, BRUTEFORCE_RESTARTS, seed).unwrap();
                            [horo - brute, brute - horo, (bell_max_x(s).0 - horo).abs()]
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().unwrap())
            .collect()
    });
    let max = |k: usize| gaps.iter().map(|g| g[k]).fold(f64::NEG_INFINITY, f64::max);
    let (below, above, closed) = (max(0), max(1), max(2));
    let pass = below <= 1e-4 && above <= 1e-12 && closed <= 1e-10;
    outcome(
        pass,
        format!(
            "max shortfall = {below:.3e}, max excess = {above:.3e}, |B_x - B_H| <= {closed:.3e}"
        ),
    )
}

struct Run {
    records: Vec<TrajectoryRecord>,
    hygiene: Hygiene,
}

fn run(rho0: &cpb_core::DensityMatrix, p: &SimParams, grid: &[f64]) -> Run {
    let states = dynamics::evolve(rho0, p, grid).unwrap();
    Run {
        records: records_from_states(&states).unwrap(),
        hygiene: Hygiene::of(&states),
    }
}

fn criterion_4(hygiene: &mut Vec<(&'static str, Hygiene)>) -> Outcome {
    let p = SimParams::lorentzian(1e-3).unwrap();
    let grid = uniform_grid(T_MAX, SAMPLES).unwrap();
    let run = run(&initial::super_radiant(), &p, &grid);
    hygiene.push(("plus, lambda=1e-3", run.hygiene));

    let dev = run
        .records
        .iter()
        .map(|r| (r.rho_pp - rho_pp_analytic(r.t, &p)).abs())
        .fold(0.0, f64::max);
    let upper = run.records.iter().filter(|r| r.rho_pp >= 1.0 / 3.0);
    let rel = check_closed_relation(upper, Relation::SuperRadiant, 1e-8);

    // B > 2 intervals against the analytic ρ₊₊ > 1/√2 intervals.
    let measured = detect_branches(&run.records, 2.0).unwrap();
    let fine = uniform_grid(T_MAX, 10 * SAMPLES).unwrap();
    let scaled: Vec<f64> = fine
        .iter()
        .map(|&t| rho_pp_analytic(t, &p) / FRAC_1_SQRT_2)
        .collect();
    let expected = detect_branches_series(&fine, &scaled, 1.0).unwrap();
    let step = grid[1] - grid[0];
    let aligned = measured.len() == expected.len()
        && measured.iter().zip(&expected).all(|(m, e)| {
            (m.t_start - e.t_start).abs() <= step && (m.t_end - e.t_end).abs() <= step
        });
    let pass = dev <= 1e-6 && rel.holds && aligned;
    outcome(
        pass,
        format!(
            "max |rho_pp num - analytic| = {dev:.3e}, relation residual = {:.3e} over {} samples, \
             {} violation intervals vs {} analytic",
            rel.max_residual,
            rel.samples,
            measured.len(),
            expected.len()
        ),
    )
}

fn criterion_5(hygiene: &mut Vec<(&'static str, Hygiene)>) -> Outcome {
    let q = PerfectCavityParams::new(1.0).unwrap();
    let p = SimParams::single_mode(q.omega()).unwrap();
    let half = std::f64::consts::PI / (6.0_f64.sqrt() * q.omega());
    let mut grid = uniform_grid(q.period(), 400).unwrap();
    grid.push(half);
    grid.sort_by(f64::total_cmp);
    let states = dynamics::evolve(&initial::bell_psi(), &p, &grid).unwrap();
    hygiene.push(("psi, perfect cavity", Hygiene::of(&states)));

    let mut dev = 0.0_f64;
    for s in &states {
        let x = quantifiers::validate_x_state(&s.rho, quantifiers::X_TOL).unwrap();
        let e = perfect_cavity_psi(s.t, &q);
        for d in [
            x.p11 - e.p11,
            x.p22 - e.p22,
            x.p33 - e.p33,
            x.p44 - e.p44,
            (x.c14 - e.c14).norm(),
            (x.c23 - e.c23).norm(),
        ] {
            dev = dev.max(d.abs());
        }
    }
    let at_half = states.iter().find(|s| s.t == half).unwrap();
    let t = cpb_triplet(&at_half.rho).unwrap();
    let target = [1.0 / 3.0, 77.0 / 81.0, 2.0 * 10.0_f64.sqrt() / 3.0];
    let tdev = [t.c - target[0], t.p - target[1], t.b - target[2]]
        .iter()
        .fold(0.0_f64, |a, d| a.max(d.abs()));
    outcome(
        dev <= 1e-6 && tdev <= 1e-6,
        format!(
            "max element deviation = {dev:.3e}; at half period (C,P,B) = ({:.9}, {:.9}, {:.9})",
            t.c, t.p, t.b
        ),
    )
}

fn criterion_6(hygiene: &mut Vec<(&'static str, Hygiene)>) -> Outcome {
    let p = SimParams::lorentzian(1e-3).unwrap();
    let grid = uniform_grid(T_MAX, SAMPLES).unwrap();
    let run = run(&initial::bell_psi(), &p, &grid);
    hygiene.push(("psi, lambda=1e-3", run.hygiene));
    let branches = detect_branches(&run.records, 2.0).unwrap();
    let first = run.records[0].triplet;
    let starts_pure = (first.c - 1.0).abs() <= 1e-12
        && (first.p - 1.0).abs() <= 1e-12
        && (first.b - 2.0 * SQRT_2).abs() <= 1e-12
        && branches
            .first()
            .is_some_and(|b| b.open_start && b.t_start == 0.0);
    let later_hit = run.records.iter().find(|r| {
        r.triplet.b > 2.0
            && r.triplet.p > 0.9
            && r.triplet.c < 0.4
            && branches
                .iter()
                .skip(1)
                .any(|b| b.t_start < r.t && r.t <= b.t_end)
    });
    let spans: Vec<String> = branches
        .iter()
        .map(|b| format!("[{:.2}, {:.2}]", b.t_start, b.t_end))
        .collect();
    let mut detail = format!("{} branches {}", branches.len(), spans.join(" "));
    if let Some(r) = later_hit {
        detail += &format!(
            "; t={:.2}: (C,P,B) = ({:.4}, {:.4}, {:.4})",
            r.t, r.triplet.c, r.triplet.p, r.triplet.b
        );
    }
    outcome(
        branches.len() >= 3 && starts_pure && later_hit.is_some(),
        detail,
    )
}

fn criterion_7(hygiene: &mut Vec<(&'static str, Hygiene)>) -> Outcome {
    let p = SimParams::lorentzian(1e-2).unwrap();
    let grid = uniform_grid(T_MAX, SAMPLES).unwrap();
    let run = run(&initial::bell_psi(), &p, &grid);
    hygiene.push(("psi, lambda=1e-2", run.hygiene));
    let inv = detect_ordering_inversions(&run.records);
    let detail = match inv.first() {
        Some(&(i, j)) => {
            let (a, b) = (&run.records[i], &run.records[j]);
            format!(
                "{} pairs (capped); first: t={:.2} (C={:.4}, B={:.4}) vs t={:.2} (C={:.4}, B={:.4})",
                inv.len(),
                a.t,
                a.triplet.c,
                a.triplet.b,
                b.t,
                b.triplet.c,
                b.triplet.b
            )
        }
        None => "no inversions".into(),
    };
    outcome(!inv.is_empty(), detail)
}

fn criterion_8() -> Outcome {
    let b_edge = mems_cpb(MemsParam::new(FRAC_1_SQRT_2).unwrap()).b;
    let generic_edge = cpb_from_x(&mems_state(MemsParam::new(FRAC_1_SQRT_2).unwrap()))
        .unwrap()
        .b;
    let mut lower = 0.0_f64;
    for k in 1..=1000 {
        let y = FRAC_1_SQRT_2 + (1.0 - FRAC_1_SQRT_2) * k as f64 / 1000.0;
        let t = mems_cpb(MemsParam::new(y).unwrap());
        lower = lower.max((t.b - 2.0 * SQRT_2 * t.c).abs());
    }
    let (mut agree, mut bad_region) = (0.0_f64, 0usize);
    for k in 0..1000 {
        let g = MemsParam::new(k as f64 / 999.0).unwrap();
        let closed = mems_cpb(g);
        let generic = cpb_from_x(&mems_state(g)).unwrap();
        for d in [
            closed.c - generic.c,
            closed.p - generic.p,
            closed.b - generic.b,
            closed.r - generic.r,
        ] {
            agree = agree.max(d.abs());
        }
        for region in [closed.region, generic.region] {
            if matches!(region, Region::R2 | Region::R4) {
                bad_region += 1;
            }
        }
    }
    let pass = (b_edge - 2.0).abs() <= 1e-9
        && (generic_edge - 2.0).abs() <= 1e-9
        && lower <= 1e-10
        && agree <= 1e-10
        && bad_region == 0;
    outcome(
        pass,
        format!(
            "B(1/sqrt2) = {b_edge:.15}, max |B - 2sqrt2 C| = {lower:.3e}, \
             closed vs generic = {agree:.3e}, regions 2/4 = {bad_region}"
        ),
    )
}

fn criterion_9(hygiene: &[(&'static str, Hygiene)]) -> Outcome {
    let lines: Vec<String> = hygiene
        .iter()
        .map(|(name, h)| {
            format!(
                "{name}: trace {:.1e}, min eig {:.1e}, off-X {:.1e}, singlet spread {:.1e}",
                h.max_trace_error, h.min_eigenvalue, h.max_x_leakage, h.singlet_spread
            )
        })
        .collect();
    let pass = hygiene.len() == 4 && hygiene.iter().all(|(_, h)| h.passes());
    outcome(pass, lines.join("; "))
}

fn report(n: usize, budget: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let o = f();
    let elapsed = start.elapsed();
    let in_time = elapsed <= budget;
    let pass = o.pass && in_time;
    println!(
        "criterion {n}: {} ({:.2}s of {}s) {}{}",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        budget.as_secs(),
        o.detail,
        if in_time { "" } else { " [over time budget]" }
    );
    pass
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let mut hygiene = Vec::new();
    let results = [
        report(1, secs(5), criterion_1),
        report(2, secs(10), criterion_2),
        report(3, secs(60), criterion_3),
        report(4, secs(120), || criterion_4(&mut hygiene)),
        report(5, secs(30), || criterion_5(&mut hygiene)),
        report(6, secs(180), || criterion_6(&mut hygiene)),
        report(7, secs(120), || criterion_7(&mut hygiene)),
        report(8, secs(5), criterion_8),
        report(9, secs(1), || criterion_9(&hygiene)),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
