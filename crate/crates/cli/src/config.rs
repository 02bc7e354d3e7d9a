//! Problem configuration: plant, constraints, target seed and synthesis knobs.

use std::path::Path;

use serde::{Deserialize, Serialize};
use stc_core::contractive::ContractiveSpec;
use stc_core::enlargement::EnlargeOptions;
use stc_core::serde_util::MatrixData;
use stc_core::{HPolytope, LinearSystem, Matrix, Tolerances, Vector};

use crate::error::{CliError, CliResult};

/// Halfspace data `{x : H x <= h}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolytopeData {
    #[serde(rename = "H")]
    pub h_matrix: MatrixData,
    pub h: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    #[serde(rename = "A")]
    pub a: MatrixData,
    #[serde(rename = "B")]
    pub b: MatrixData,
    #[serde(rename = "Hx")]
    pub hx_matrix: MatrixData,
    pub hx: Vec<f64>,
    #[serde(rename = "Hu")]
    pub hu_matrix: MatrixData,
    pub hu: Vec<f64>,
    pub lambda: f64,
    #[serde(rename = "S0")]
    pub s0: PolytopeData,
    #[serde(rename = "jMax")]
    pub j_max: usize,
    #[serde(rename = "aBar")]
    pub a_bar: f64,
    pub p: f64,
    pub q: f64,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(rename = "strictIntermediate", default)]
    pub strict_intermediate: bool,
    #[serde(rename = "maxIters", default = "default_max_iters")]
    pub max_iters: usize,
}

fn default_max_iters() -> usize {
    200
}

/// Validated, ready-to-run form of a [`ProblemConfig`].
#[derive(Debug, Clone)]
pub struct Problem {
    pub system: LinearSystem,
    pub spec: ContractiveSpec,
    pub j_max: usize,
    pub a_bar: f64,
    pub p: f64,
    pub q: f64,
    pub options: EnlargeOptions,
    pub tol: Tolerances,
}

fn check_matrix(
    name: &str,
    m: &MatrixData,
    rows: Option<usize>,
    cols: Option<usize>,
    errs: &mut Vec<String>,
) -> Option<Matrix> {
    let mat = match m.to_matrix() {
        Ok(mat) => mat,
        Err(e) => {
            errs.push(format!("{name}: {e}"));
            return None;
        }
    };
    if let Some(r) = rows.filter(|&r| r != mat.nrows()) {
        errs.push(format!("{name}: expected {r} rows, found {}", mat.nrows()));
    }
    if let Some(c) = cols.filter(|&c| c != mat.ncols()) {
        errs.push(format!("{name}: expected {c} columns, found {}", mat.ncols()));
    }
    if !mat.iter().all(|v| v.is_finite()) {
        errs.push(format!("{name}: entries must be finite"));
    }
    Some(mat)
}

fn check_offsets(name: &str, h: &[f64], rows: Option<usize>, errs: &mut Vec<String>) {
    if let Some(r) = rows.filter(|&r| r != h.len()) {
        errs.push(format!(
            "{name}: expected {r} entries to match the constraint matrix, found {}",
            h.len()
        ));
    }
    if h.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
        errs.push(format!("{name}: every offset must be finite and strictly positive"));
    }
}

fn check_positive(name: &str, v: f64, errs: &mut Vec<String>) {
    if !(v > 0.0 && v.is_finite()) {
        errs.push(format!("{name}: must be finite and > 0, got {v}"));
    }
}

impl ProblemConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Config(vec![e.to_string()]))
    }

    /// Checks every field and reports all offending ones at once.
    pub fn validate(&self) -> CliResult<Problem> {
        let mut errs = Vec::new();
        let a = check_matrix("A", &self.a, None, None, &mut errs);
        let n = a.as_ref().map(|a| a.nrows());
        if let Some(a) = &a {
            if a.nrows() != a.ncols() {
                errs.push(format!("A: must be square, found {}x{}", a.nrows(), a.ncols()));
            }
        }
        let b = check_matrix("B", &self.b, n, None, &mut errs);
        let m = b.as_ref().map(|b| b.ncols());
        let hx = check_matrix("Hx", &self.hx_matrix, None, n, &mut errs);
        check_offsets("hx", &self.hx, hx.as_ref().map(|h| h.nrows()), &mut errs);
        let hu = check_matrix("Hu", &self.hu_matrix, None, m, &mut errs);
        check_offsets("hu", &self.hu, hu.as_ref().map(|h| h.nrows()), &mut errs);
        let h0 = check_matrix("S0.H", &self.s0.h_matrix, None, n, &mut errs);
        check_offsets("S0.h", &self.s0.h, h0.as_ref().map(|h| h.nrows()), &mut errs);
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            errs.push(format!(
                "lambda: must lie in the open interval (0, 1), got {}",
                self.lambda
            ));
        }
        if self.j_max == 0 {
            errs.push("jMax: must be >= 1".into());
        }
        if self.max_iters == 0 {
            errs.push("maxIters: must be >= 1".into());
        }
        check_positive("aBar", self.a_bar, &mut errs);
        check_positive("p", self.p, &mut errs);
        check_positive("q", self.q, &mut errs);
        let t = &self.tolerances;
        for (name, v) in [
            ("tolerances.feasTol", t.feas_tol),
            ("tolerances.memTol", t.mem_tol),
            ("tolerances.dedupeTol", t.dedupe_tol),
            ("tolerances.redTol", t.red_tol),
            ("tolerances.singularTol", t.singular_tol),
            ("tolerances.strictTol", t.strict_tol),
            ("tolerances.convergenceEps", t.convergence_eps),
        ] {
            check_positive(name, v, &mut errs);
        }
        if !errs.is_empty() {
            return Err(CliError::Config(errs));
        }
        let (a, b, hx, hu, h0) = (
            a.expect("validated"),
            b.expect("validated"),
            hx.expect("validated"),
            hu.expect("validated"),
            h0.expect("validated"),
        );
        let state_set = HPolytope::new(hx, Vector::from_vec(self.hx.clone()))?;
        let input_set = HPolytope::new(hu, Vector::from_vec(self.hu.clone()))?;
        let seed = HPolytope::new(h0, Vector::from_vec(self.s0.h.clone()))?;
        let system = LinearSystem::new(a, b, state_set, input_set)?;
        let spec = ContractiveSpec {
            lambda: self.lambda,
            seed,
            convergence_eps: t.convergence_eps,
            max_iters: self.max_iters,
        };
        Ok(Problem {
            system,
            spec,
            j_max: self.j_max,
            a_bar: self.a_bar,
            p: self.p,
            q: self.q,
            options: EnlargeOptions {
                strict_intermediate: self.strict_intermediate,
            },
            tol: *t,
        })
    }

    /// Canonical JSON rendering used for hashing.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const SCALAR: &str = r#"{
        "A": {"rows": 1, "cols": 1, "data": [1.0]},
        "B": {"rows": 1, "cols": 1, "data": [1.0]},
        "Hx": {"rows": 2, "cols": 1, "data": [1.0, -1.0]},
        "hx": [1.0, 1.0],
        "Hu": {"rows": 2, "cols": 1, "data": [1.0, -1.0]},
        "hu": [0.3, 0.3],
        "lambda": 0.5,
        "S0": {"H": {"rows": 2, "cols": 1, "data": [1.0, -1.0]}, "h": [0.1, 0.1]},
        "jMax": 1,
        "aBar": 0.01,
        "p": 1.0,
        "q": 1.0
    }"#;

    #[test]
    fn parses_and_validates() {
        let cfg = ProblemConfig::parse(SCALAR).unwrap();
        assert_eq!(cfg.tolerances, Tolerances::default());
        assert_eq!(cfg.max_iters, 200);
        let prob = cfg.validate().unwrap();
        assert_eq!(prob.system.state_dim(), 1);
        assert_eq!(prob.spec.lambda, 0.5);
    }

    #[test]
    fn lambda_one_rejected() {
        let mut cfg = ProblemConfig::parse(SCALAR).unwrap();
        cfg.lambda = 1.0;
        match cfg.validate() {
            Err(CliError::Config(errs)) => assert!(errs.iter().any(|e| e.starts_with("lambda"))),
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn lists_every_bad_field() {
        let mut cfg = ProblemConfig::parse(SCALAR).unwrap();
        cfg.hu = vec![0.3, -0.3];
        cfg.p = 0.0;
        cfg.b = MatrixData {
            rows: 2,
            cols: 1,
            data: vec![1.0, 1.0],
        };
        let Err(CliError::Config(errs)) = cfg.validate() else {
            panic!("expected schema error");
        };
        for field in ["hu", "p", "B"] {
            assert!(
                errs.iter().any(|e| e.starts_with(field)),
                "{field} missing from {errs:?}"
            );
        }
    }

    #[test]
    fn unknown_and_missing_fields() {
        let typo = SCALAR.replace("\"aBar\"", "\"abar\"");
        assert!(matches!(ProblemConfig::parse(&typo), Err(CliError::Config(_))));
    }
}
