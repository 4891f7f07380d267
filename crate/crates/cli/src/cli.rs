use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cpb_core::dynamics::{PerfectCavityParams, SimParams};
use cpb_core::quantifiers::cpb_triplet;
use cpb_core::trajectory::{detect_branches_series, sample_trajectory, uniform_grid, Scenario};

use crate::error::{CliError, Result};
use crate::formats::{read_density, TripletJson};
use crate::records::{read_records, rows, write_csv_to, write_records};
use crate::sweep::{mems_sweep, write_mems_csv, write_mems_file};
use crate::verify::{render_table, run_suites, Check, Suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_VERIFY_FAILED: i32 = 2;

/// Seed used when neither `--seed` nor `CPB_SEED` is given.
pub const DEFAULT_SEED: u64 = 42;
pub const SEED_ENV: &str = "CPB_SEED";

/// C–P–B quantifiers and common-reservoir dynamics of two qubits.
///
/// Rates are in units of Γ and times in units of 1/Γ.
#[derive(Debug, Parser)]
#[command(name = "cpb", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate a scenario and write its trajectory (CSV, or JSON for *.json).
    Simulate(SimulateArgs),
    /// Print the quantifiers of a density matrix given as JSON.
    Quantify {
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
    },
    /// Sweep the MEMS family and write gamma,C,P,B,R,region.
    Mems(MemsArgs),
    /// List the B > threshold branches of a trajectory file.
    Branches {
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        #[arg(long, default_value_t = 2.0)]
        threshold: f64,
    },
    /// Run invariant suites and print a pass/fail table.
    Verify {
        /// all, or one of qmat, quantifiers, dynamics, mems, trajectory.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Falls back to CPB_SEED, then to 42.
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Initial {
    /// (|00> + |11>)/sqrt2 in a lossy cavity.
    Psi,
    /// (|10> + |01>)/sqrt2 in a lossy cavity.
    Plus,
    /// (|00> + |11>)/sqrt2 in a lossless cavity.
    PsiPerfect,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long, value_enum, conflicts_with = "input")]
    initial: Option<Initial>,
    /// Custom initial two-qubit density matrix (JSON), evolved in the lossy cavity.
    #[arg(long = "in", value_name = "FILE")]
    input: Option<PathBuf>,
    /// Lorentzian half-width.
    #[arg(long, default_value_t = 1e-3)]
    lambda: f64,
    /// Per-qubit coupling of the lossless cavity.
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    #[arg(long, default_value_t = 200.0)]
    tmax: f64,
    #[arg(long, default_value_t = 4000)]
    samples: usize,
    /// Pseudomode Fock cutoff.
    #[arg(long, default_value_t = 2)]
    nmax: usize,
    /// Integration step; derived from the rates when omitted.
    #[arg(long)]
    dt: Option<f64>,
    /// Output file; CSV on stdout when omitted.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MemsArgs {
    #[arg(long, default_value_t = 0.0)]
    gamma_min: f64,
    #[arg(long, default_value_t = 1.0)]
    gamma_max: f64,
    #[arg(long, default_value_t = 200)]
    steps: usize,
    /// Output file; stdout when omitted.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let env_seed = std::env::var(SEED_ENV).ok();
    run_with(
        args,
        env_seed.as_deref(),
        &mut std::io::stdout(),
        &mut std::io::stderr(),
    )
}

/// [`run`] with explicit environment seed and output streams.
pub fn run_with<I, T>(
    args: I,
    env_seed: Option<&str>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, env_seed, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INVALID
        }
    }
}

fn dispatch(
    cmd: Command,
    env_seed: Option<&str>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    match cmd {
        Command::Simulate(a) => simulate(a, out, err),
        Command::Quantify { input } => {
            let rho = read_density(&input)?;
            let t = cpb_triplet(&rho)?;
            let text =
                serde_json::to_string_pretty(&TripletJson::from(&t)).expect("finite triplet");
            writeln!(out, "{text}").map_err(stdout_error)?;
            Ok(EXIT_OK)
        }
        Command::Mems(a) => {
            let sweep = mems_sweep(a.gamma_min, a.gamma_max, a.steps)?;
            match a.out {
                Some(path) => write_mems_file(&path, &sweep)?,
                None => write_mems_csv(&mut *out, &sweep).map_err(CliError::csv("<stdout>"))?,
            }
            Ok(EXIT_OK)
        }
        Command::Branches { input, threshold } => {
            let recs = read_records(&input)?;
            let t: Vec<f64> = recs.iter().map(|r| r.t).collect();
            let b: Vec<f64> = recs.iter().map(|r| r.b).collect();
            let branches = detect_branches_series(&t, &b, threshold)?;
            writeln!(out, "index,t_start,t_end,b_peak,t_peak,open_start,open_end")
                .map_err(stdout_error)?;
            for br in &branches {
                writeln!(
                    out,
                    "{},{:.16e},{:.16e},{:.16e},{:.16e},{},{}",
                    br.index,
                    br.t_start,
                    br.t_end,
                    br.b_peak,
                    br.t_peak,
                    br.open_start,
                    br.open_end
                )
                .map_err(stdout_error)?;
            }
            Ok(EXIT_OK)
        }
        Command::Verify { suite, seed } => verify(&suite, seed, env_seed, out),
    }
}

fn stdout_error(e: std::io::Error) -> CliError {
    CliError::Io {
        path: "<stdout>".into(),
        source: e,
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Usage(format!(
            "--{name} must be positive, got {v}"
        )))
    }
}

fn simulate(a: SimulateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    positive("tmax", a.tmax)?;
    if a.samples < 2 {
        return Err(CliError::Usage(format!(
            "--samples must be at least 2, got {}",
            a.samples
        )));
    }
    let tune = |p: SimParams| -> Result<SimParams> {
        let p = p.with_n_max(a.nmax);
        Ok(match a.dt {
            Some(dt) => {
                positive("dt", dt)?;
                p.with_dt(dt)?
            }
            None => p,
        })
    };
    let scenario = match (a.input.as_ref(), a.initial.unwrap_or(Initial::Psi)) {
        (Some(path), _) => {
            positive("lambda", a.lambda)?;
            Scenario::Custom {
                initial: read_density(path)?,
                params: tune(SimParams::lorentzian(a.lambda)?)?,
            }
        }
        (None, Initial::Psi) => {
            positive("lambda", a.lambda)?;
            Scenario::PsiLossy(tune(SimParams::lorentzian(a.lambda)?)?)
        }
        (None, Initial::Plus) => {
            positive("lambda", a.lambda)?;
            Scenario::PlusLossy(tune(SimParams::lorentzian(a.lambda)?)?)
        }
        (None, Initial::PsiPerfect) => {
            positive("omega", a.omega)?;
            let q = PerfectCavityParams::new(a.omega)?;
            Scenario::Custom {
                initial: cpb_core::dynamics::initial::bell_psi(),
                params: tune(SimParams::single_mode(q.omega())?)?,
            }
        }
    };
    let grid = uniform_grid(a.tmax, a.samples)?;
    let run = sample_trajectory(&scenario, &grid)?;
    let rows = rows(&run.records);
    match &a.out {
        Some(path) => write_records(path, &rows)?,
        None => write_csv_to(&mut *out, &rows).map_err(CliError::csv("<stdout>"))?,
    }
    let h = run.hygiene;
    let t: Vec<f64> = rows.iter().map(|r| r.t).collect();
    let b: Vec<f64> = rows.iter().map(|r| r.b).collect();
    let branches = detect_branches_series(&t, &b, 2.0)?;
    let _ = writeln!(
        err,
        "{} samples, {} B>2 branches; trace drift {:.1e}, min eigenvalue {:.1e}, off-X {:.1e}, singlet spread {:.1e}",
        rows.len(),
        branches.len(),
        h.max_trace_error,
        h.min_eigenvalue,
        h.max_x_leakage,
        h.singlet_spread
    );
    Ok(EXIT_OK)
}

fn verify(
    suite: &str,
    seed: Option<u64>,
    env_seed: Option<&str>,
    out: &mut dyn Write,
) -> Result<i32> {
    let seed = match (seed, env_seed) {
        (Some(s), _) => s,
        (None, Some(text)) => text.trim().parse().map_err(|_| {
            CliError::Usage(format!("{SEED_ENV}='{text}' is not an unsigned integer"))
        })?,
        (None, None) => DEFAULT_SEED,
    };
    let suites: Vec<Suite> = if suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![suite.parse().map_err(|e: String| {
            CliError::Usage(format!(
                "{e}; expected all, qmat, quantifiers, dynamics, mems or trajectory"
            ))
        })?]
    };
    writeln!(out, "seed: {seed}").map_err(stdout_error)?;
    let checks = run_suites(&suites, seed);
    let failed = checks.iter().filter(|c| !c.pass).count();
    write!(out, "{}", render_table(&checks)).map_err(stdout_error)?;
    writeln!(out, "{} checks, {} failed", checks.len(), failed).map_err(stdout_error)?;
    Ok(verify_exit_code(&checks))
}

/// Exit 2 when any check failed.
pub fn verify_exit_code(checks: &[Check]) -> i32 {
    if checks.iter().all(|c| c.pass) {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(pass: bool) -> Check {
        Check {
            suite: "s",
            name: "n",
            pass,
            detail: String::new(),
        }
    }

    #[test]
    fn one_failing_check_fails_verification() {
        assert_eq!(verify_exit_code(&[check(true), check(true)]), EXIT_OK);
        assert_eq!(
            verify_exit_code(&[check(true), check(false)]),
            EXIT_VERIFY_FAILED
        );
    }

    #[test]
    fn env_seed_must_be_numeric() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run_with(
            ["cpb", "verify", "--suite", "qmat"],
            Some("abc"),
            &mut out,
            &mut err,
        );
        assert_eq!(code, EXIT_INVALID);
        assert!(String::from_utf8(err).unwrap().contains("CPB_SEED"));
    }
}
