//! JSON forms of density matrices and quantifier triplets.

use std::fs;
use std::path::Path;

use cpb_core::{Complex64, ComplexMatrix, CpbTriplet, DensityMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// `{"dim": n, "re": [[..]; n], "im": [[..]; n]}`; `im` may be omitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Vec<Vec<f64>>,
}

impl DensityJson {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let n = m.dim();
        let rows = |f: fn(&Complex64) -> f64| {
            (0..n)
                .map(|i| (0..n).map(|j| f(&m[(i, j)])).collect())
                .collect()
        };
        Self {
            dim: n,
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
    }

    pub fn to_matrix(&self) -> std::result::Result<ComplexMatrix, String> {
        let n = self.dim;
        if n == 0 {
            return Err("dim must be positive".into());
        }
        let check = |name: &str, rows: &[Vec<f64>]| {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                Err(format!("\"{name}\" must be a {n}×{n} array of rows"))
            } else {
                Ok(())
            }
        };
        check("re", &self.re)?;
        if !self.im.is_empty() {
            check("im", &self.im)?;
        }
        Ok(ComplexMatrix::from_fn(n, |i, j| {
            let im = self.im.get(i).map_or(0.0, |r| r[j]);
            Complex64::new(self.re[i][j], im)
        }))
    }
}

pub fn read_density(path: &Path) -> Result<DensityMatrix> {
    let text = fs::read_to_string(path).map_err(CliError::io(path))?;
    let parsed: DensityJson = serde_json::from_str(&text).map_err(CliError::json(path))?;
    let m = parsed
        .to_matrix()
        .map_err(|msg| CliError::format(path, msg))?;
    DensityMatrix::new(m).map_err(|e| CliError::format(path, e.to_string()))
}

pub fn write_density(path: &Path, rho: &DensityMatrix) -> Result<()> {
    let text = serde_json::to_string_pretty(&DensityJson::from_matrix(rho.matrix()))
        .expect("finite numbers serialise");
    fs::write(path, text + "\n").map_err(CliError::io(path))
}

/// Quantifiers as printed by `quantify`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TripletJson {
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "P")]
    pub p: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "R")]
    pub r: f64,
    pub region: u8,
    #[serde(rename = "B1")]
    pub b1: f64,
    #[serde(rename = "B2")]
    pub b2: f64,
    pub u1: f64,
    pub u2: f64,
    pub u3: f64,
    #[serde(rename = "K1")]
    pub k1: f64,
    #[serde(rename = "K2")]
    pub k2: f64,
}

impl From<&CpbTriplet> for TripletJson {
    fn from(t: &CpbTriplet) -> Self {
        Self {
            c: t.c,
            p: t.p,
            b: t.b,
            r: t.r,
            region: t.region.index(),
            b1: t.b1,
            b2: t.b2,
            u1: t.u1,
            u2: t.u2,
            u3: t.u3,
            k1: t.k1,
            k2: t.k2,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use cpb_core::dynamics::initial;

    #[test]
    fn density_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rho.json");
        write_density(&path, &initial::bell_psi()).unwrap();
        assert_eq!(read_density(&path).unwrap(), initial::bell_psi());
    }

    #[test]
    fn imaginary_part_is_optional() {
        let j: DensityJson = serde_json::from_str(r#"{"dim":2,"re":[[0.5,0],[0,0.5]]}"#).unwrap();
        assert_eq!(j.to_matrix().unwrap().trace().re, 1.0);
    }

    #[test]
    fn malformed_inputs_are_reported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        for (text, needle) in [
            ("{", "malformed JSON"),
            (r#"{"dim":2,"re":[[1,0]]}"#, "2×2"),
            (r#"{"dim":2,"re":[[1,0],[0,1]]}"#, "trace"),
            (r#"{"dim":2,"re":[[1,0],[0,0]],"extra":1}"#, "unknown field"),
        ] {
            std::fs::write(&path, text).unwrap();
            let msg = read_density(&path).unwrap_err().to_string();
            assert!(msg.contains(needle), "{msg}");
            assert!(msg.contains("bad.json"), "{msg}");
        }
        let missing = dir.path().join("nope.json");
        assert!(read_density(&missing)
            .unwrap_err()
            .to_string()
            .contains("nope.json"));
    }
}
