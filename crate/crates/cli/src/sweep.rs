//! MEMS sweeps over γ.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use cpb_core::mems::{mems_cpb, MemsCpb, MemsParam};

use crate::error::{CliError, Result};

pub const MEMS_COLUMNS: [&str; 6] = ["gamma", "C", "P", "B", "R", "region"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MemsRow {
    pub gamma: f64,
    pub cpb: MemsCpb,
}

/// `steps + 1` equally spaced γ from `gamma_min` to `gamma_max`.
///
/// A grid point within 1e-12 of 1/√2 is placed on 1/√2 exactly.
pub fn mems_sweep(gamma_min: f64, gamma_max: f64, steps: usize) -> Result<Vec<MemsRow>> {
    if !(0.0 <= gamma_min && gamma_min < gamma_max && gamma_max <= 1.0) {
        return Err(CliError::Usage(format!(
            "gamma range must satisfy 0 <= gamma-min < gamma-max <= 1, got [{gamma_min}, {gamma_max}]"
        )));
    }
    if steps == 0 {
        return Err(CliError::Usage("steps must be at least 1".into()));
    }
    let width = gamma_max - gamma_min;
    (0..=steps)
        .map(|k| {
            let mut g = if k == steps {
                gamma_max
            } else {
                gamma_min + width * k as f64 / steps as f64
            };
            if (g - FRAC_1_SQRT_2).abs() <= 1e-12 {
                g = FRAC_1_SQRT_2;
            }
            let cpb = mems_cpb(MemsParam::new(g)?);
            Ok(MemsRow { gamma: g, cpb })
        })
        .collect()
}

pub fn write_mems_csv(out: impl Write, rows: &[MemsRow]) -> std::result::Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(MEMS_COLUMNS)?;
    for r in rows {
        let c = &r.cpb;
        w.write_record([
            format!("{:.16e}", r.gamma),
            format!("{:.16e}", c.c),
            format!("{:.16e}", c.p),
            format!("{:.16e}", c.b),
            format!("{:.16e}", c.r),
            c.region.index().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_mems_file(path: &Path, rows: &[MemsRow]) -> Result<()> {
    let file = File::create(path).map_err(CliError::io(path))?;
    write_mems_csv(BufWriter::new(file), rows).map_err(CliError::csv(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_sweep_brackets_the_violation_edge() {
        let rows = mems_sweep(0.0, 1.0, 200).unwrap();
        assert_eq!(rows.len(), 201);
        assert_eq!((rows[0].gamma, rows[200].gamma), (0.0, 1.0));
        let first_above = rows.iter().position(|r| r.cpb.b > 2.0).unwrap();
        assert!(rows[first_above - 1].gamma < FRAC_1_SQRT_2);
        assert!(rows[first_above].gamma > FRAC_1_SQRT_2);
        assert!(rows[..first_above].iter().all(|r| r.cpb.b <= 2.0));
    }

    #[test]
    fn the_violation_edge_is_hit_when_on_grid() {
        let rows = mems_sweep(FRAC_1_SQRT_2 - 0.1, FRAC_1_SQRT_2 + 0.1, 2).unwrap();
        assert_eq!(rows[1].gamma, FRAC_1_SQRT_2);
        assert!((rows[1].cpb.b - 2.0).abs() <= 1e-15);
    }

    #[test]
    fn degenerate_and_invalid_ranges_are_rejected() {
        assert!(mems_sweep(1.0, 1.0, 1).is_err());
        assert!(mems_sweep(2.0 / 3.0, 2.0 / 3.0, 1).is_err());
        assert!(mems_sweep(-0.1, 1.0, 10).is_err());
        assert!(mems_sweep(0.0, 1.1, 10).is_err());
        assert!(mems_sweep(0.5, 0.2, 10).is_err());
        assert!(mems_sweep(0.0, 1.0, 0).is_err());
        assert!(mems_sweep(f64::NAN, 1.0, 3).is_err());
    }

    #[test]
    fn csv_layout() {
        let rows = mems_sweep(0.5, 1.0, 2).unwrap();
        let mut buf = Vec::new();
        write_mems_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "gamma,C,P,B,R,region");
        assert_eq!(lines.len(), 4);
        assert!(lines[3].ends_with(",1"));
        assert!(lines[1].ends_with(",3"));
    }
}
