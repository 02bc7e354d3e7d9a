//! Dense two-phase primal simplex with Bland's anti-cycling rule.
//!
//! Problems are stated over free variables `z`:
//!
//! ```text
//! minimize   c·z
//! subject to G z <= g
//!            E z  = e
//! ```
//!
//! Free variables are split as `z = z⁺ − z⁻`. Every `<=` row gets a slack
//! column; rows with a negative right-hand side and all equality rows get an
//! artificial column that phase one drives to zero.

use crate::{Error, Matrix, Result, Vector};

const PIVOT_TOL: f64 = 1e-11;
const MAX_PIVOTS: usize = 200_000;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    objective: Vector,
    ineq_lhs: Matrix,
    ineq_rhs: Vector,
    eq_lhs: Matrix,
    eq_rhs: Vector,
}

impl LinearProgram {
    pub fn new(objective: Vector, ineq_lhs: Matrix, ineq_rhs: Vector) -> Result<Self> {
        let nvars = objective.len();
        let eq_lhs = Matrix::zeros(0, nvars);
        Self::with_equalities(objective, ineq_lhs, ineq_rhs, eq_lhs, Vector::zeros(0))
    }

    pub fn with_equalities(
        objective: Vector,
        ineq_lhs: Matrix,
        ineq_rhs: Vector,
        eq_lhs: Matrix,
        eq_rhs: Vector,
    ) -> Result<Self> {
        let nvars = objective.len();
        if ineq_lhs.ncols() != nvars || eq_lhs.ncols() != nvars {
            return Err(Error::Dimension(format!(
                "constraint matrices have {} / {} columns, objective has {}",
                ineq_lhs.ncols(),
                eq_lhs.ncols(),
                nvars
            )));
        }
        if ineq_lhs.nrows() != ineq_rhs.len() || eq_lhs.nrows() != eq_rhs.len() {
            return Err(Error::Dimension(format!(
                "{} inequality rows vs {} bounds, {} equality rows vs {} bounds",
                ineq_lhs.nrows(),
                ineq_rhs.len(),
                eq_lhs.nrows(),
                eq_rhs.len()
            )));
        }
        let finite = objective.iter().all(|v| v.is_finite())
            && ineq_lhs.iter().all(|v| v.is_finite())
            && ineq_rhs.iter().all(|v| v.is_finite())
            && eq_lhs.iter().all(|v| v.is_finite())
            && eq_rhs.iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::Argument("LP data must be finite".into()));
        }
        Ok(Self {
            objective,
            ineq_lhs,
            ineq_rhs,
            eq_lhs,
            eq_rhs,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn objective(&self) -> &Vector {
        &self.objective
    }

    pub fn ineq_lhs(&self) -> &Matrix {
        &self.ineq_lhs
    }

    pub fn ineq_rhs(&self) -> &Vector {
        &self.ineq_rhs
    }

    pub fn eq_lhs(&self) -> &Matrix {
        &self.eq_lhs
    }

    pub fn eq_rhs(&self) -> &Vector {
        &self.eq_rhs
    }

    /// Largest violation of any constraint at `z` (0 when feasible).
    pub fn max_violation(&self, z: &Vector) -> f64 {
        let ineq = (&self.ineq_lhs * z - &self.ineq_rhs)
            .iter()
            .fold(0.0f64, |m, &r| m.max(r));
        let eq = (&self.eq_lhs * z - &self.eq_rhs)
            .iter()
            .fold(0.0f64, |m, &r| m.max(r.abs()));
        ineq.max(eq)
    }
}

/// Row-at-a-time builder for [`LinearProgram`].
#[derive(Debug, Clone)]
pub struct LpBuilder {
    nvars: usize,
    objective: Vec<f64>,
    ineq: Vec<f64>,
    ineq_rhs: Vec<f64>,
    eq: Vec<f64>,
    eq_rhs: Vec<f64>,
}

impl LpBuilder {
    pub fn new(nvars: usize) -> Self {
        Self {
            nvars,
            objective: vec![0.0; nvars],
            ineq: Vec::new(),
            ineq_rhs: Vec::new(),
            eq: Vec::new(),
            eq_rhs: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.nvars
    }

    pub fn set_objective(&mut self, var: usize, coeff: f64) -> &mut Self {
        self.objective[var] = coeff;
        self
    }

    /// Adds `row · z <= rhs`.
    pub fn le(&mut self, row: &[f64], rhs: f64) -> &mut Self {
        assert_eq!(row.len(), self.nvars, "row length");
        self.ineq.extend_from_slice(row);
        self.ineq_rhs.push(rhs);
        self
    }

    /// Adds `Σ coeff·z[var] <= rhs` from sparse terms.
    pub fn le_terms(&mut self, terms: &[(usize, f64)], rhs: f64) -> &mut Self {
        let start = self.ineq.len();
        self.ineq.resize(start + self.nvars, 0.0);
        for &(var, coeff) in terms {
            self.ineq[start + var] += coeff;
        }
        self.ineq_rhs.push(rhs);
        self
    }

    pub fn eq(&mut self, row: &[f64], rhs: f64) -> &mut Self {
        assert_eq!(row.len(), self.nvars, "row length");
        self.eq.extend_from_slice(row);
        self.eq_rhs.push(rhs);
        self
    }

    pub fn build(self) -> LinearProgram {
        let n = self.nvars;
        let ineq = Matrix::from_row_slice(self.ineq_rhs.len(), n, &self.ineq);
        let eq = Matrix::from_row_slice(self.eq_rhs.len(), n, &self.eq);
        LinearProgram::with_equalities(
            Vector::from_vec(self.objective),
            ineq,
            Vector::from_vec(self.ineq_rhs),
            eq,
            Vector::from_vec(self.eq_rhs),
        )
        .expect("builder keeps dimensions consistent")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpOutcome {
    pub status: LpStatus,
    pub optimizer: Option<Vector>,
    pub objective: f64,
}

impl LpOutcome {
    fn infeasible() -> Self {
        Self {
            status: LpStatus::Infeasible,
            optimizer: None,
            objective: f64::INFINITY,
        }
    }

    fn unbounded() -> Self {
        Self {
            status: LpStatus::Unbounded,
            optimizer: None,
            objective: f64::NEG_INFINITY,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    /// The optimizer when the status is `Optimal`.
    pub fn solution(&self) -> Option<&Vector> {
        self.optimizer.as_ref()
    }
}

struct Tableau {
    rows: usize,
    cols: usize,
    // (rows + 1) x (cols + 1), row-major; last row is the reduced-cost row,
    // last column the right-hand side.
    data: Vec<f64>,
    basis: Vec<usize>,
    first_artificial: usize,
    dead_rows: Vec<bool>,
}

impl Tableau {
    #[inline]
    fn width(&self) -> usize {
        self.cols + 1
    }

    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.width() + c]
    }

    #[inline]
    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.cols)
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width();
        let p = self.at(r, c);
        let (before, rest) = self.data.split_at_mut(r * w);
        let (prow, after) = rest.split_at_mut(w);
        for v in prow.iter_mut() {
            *v /= p;
        }
        prow[c] = 1.0;
        let eliminate = |row: &mut [f64]| {
            let f = row[c];
            if f != 0.0 {
                for (v, &pv) in row.iter_mut().zip(prow.iter()) {
                    *v -= f * pv;
                }
                row[c] = 0.0;
            }
        };
        before.chunks_exact_mut(w).for_each(eliminate);
        after.chunks_exact_mut(w).for_each(eliminate);
        self.basis[r] = c;
    }

    /// Runs simplex iterations on the current cost row. Columns at or beyond
    /// `col_limit` never enter. Returns `false` when unbounded.
    fn optimize(&mut self, col_limit: usize, opt_tol: f64) -> Result<bool> {
        let cost_row = self.rows;
        for _ in 0..MAX_PIVOTS {
            // Bland: lowest-index improving column.
            let entering = (0..col_limit).find(|&c| self.at(cost_row, c) < -opt_tol);
            let Some(c) = entering else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                if self.dead_rows[r] {
                    continue;
                }
                let coef = self.at(r, c);
                if coef > PIVOT_TOL {
                    let ratio = self.rhs(r).max(0.0) / coef;
                    leave = match leave {
                        None => Some((r, ratio)),
                        Some((br, best)) => {
                            if ratio < best - 1e-13 * (1.0 + best.abs())
                                || (ratio <= best + 1e-13 * (1.0 + best.abs()) && self.basis[r] < self.basis[br])
                            {
                                Some((r, ratio))
                            } else {
                                Some((br, best))
                            }
                        }
                    };
                }
            }
            match leave {
                None => return Ok(false),
                Some((r, _)) => self.pivot(r, c),
            }
        }
        Err(Error::Internal(format!("simplex exceeded {MAX_PIVOTS} pivots")))
    }

    fn value_of(&self, col: usize) -> f64 {
        self.basis.iter().position(|&b| b == col).map_or(0.0, |r| self.rhs(r))
    }
}

/// Solves `lp`; see the module docs for the problem form.
pub fn lp_solve(lp: &LinearProgram, feas_tol: f64) -> Result<LpOutcome> {
    let n = lp.num_vars();
    let n_ineq = lp.ineq_rhs.len();
    let n_eq = lp.eq_rhs.len();
    let rows = n_ineq + n_eq;

    let needs_art: Vec<bool> = (0..rows).map(|r| r >= n_ineq || lp.ineq_rhs[r] < 0.0).collect();
    let n_art = needs_art.iter().filter(|&&b| b).count();
    let first_slack = 2 * n;
    let first_art = first_slack + n_ineq;
    let cols = first_art + n_art;
    let w = cols + 1;

    let mut t = Tableau {
        rows,
        cols,
        data: vec![0.0; (rows + 1) * w],
        basis: vec![0; rows],
        first_artificial: first_art,
        dead_rows: vec![false; rows],
    };

    let mut art = first_art;
    for r in 0..rows {
        let (coeffs, rhs) = if r < n_ineq {
            (lp.ineq_lhs.row(r), lp.ineq_rhs[r])
        } else {
            (lp.eq_lhs.row(r - n_ineq), lp.eq_rhs[r - n_ineq])
        };
        let sign = if rhs < 0.0 { -1.0 } else { 1.0 };
        let row = &mut t.data[r * w..(r + 1) * w];
        for k in 0..n {
            row[k] = sign * coeffs[k];
            row[n + k] = -sign * coeffs[k];
        }
        if r < n_ineq {
            row[first_slack + r] = sign;
        }
        row[cols] = sign * rhs;
        if needs_art[r] {
            row[art] = 1.0;
            t.basis[r] = art;
            art += 1;
        } else {
            t.basis[r] = first_slack + r;
        }
    }

    // Phase one: minimize the sum of artificials.
    if n_art > 0 {
        let cost = rows * w;
        for c in first_art..cols {
            t.data[cost + c] = 1.0;
        }
        for r in 0..rows {
            if t.basis[r] >= first_art {
                for c in 0..w {
                    t.data[cost + c] -= t.data[r * w + c];
                }
            }
        }
        t.optimize(cols, feas_tol * 1e-3)?;
        let infeasibility = -t.rhs(rows);
        if infeasibility > feas_tol {
            return Ok(LpOutcome::infeasible());
        }
        // Drive remaining artificials out of the basis.
        for r in 0..rows {
            if t.basis[r] < first_art {
                continue;
            }
            let mut best: Option<(usize, f64)> = None;
            for c in 0..first_art {
                let v = t.at(r, c).abs();
                if v > PIVOT_TOL && best.is_none_or(|(_, bv)| v > bv) {
                    best = Some((c, v));
                }
            }
            match best {
                Some((c, _)) => t.pivot(r, c),
                None => t.dead_rows[r] = true,
            }
        }
    }

    // Phase two.
    let cost = rows * w;
    for c in 0..w {
        t.data[cost + c] = 0.0;
    }
    for k in 0..n {
        t.data[cost + k] = lp.objective[k];
        t.data[cost + n + k] = -lp.objective[k];
    }
    for r in 0..rows {
        let b = t.basis[r];
        let cb = t.data[cost + b];
        if cb != 0.0 {
            for c in 0..w {
                t.data[cost + c] -= cb * t.data[r * w + c];
            }
        }
    }
    let opt_tol = feas_tol * 1e-3;
    if !t.optimize(t.first_artificial, opt_tol)? {
        return Ok(LpOutcome::unbounded());
    }

    let z = Vector::from_fn(n, |k, _| t.value_of(k) - t.value_of(n + k));
    let objective = lp.objective.dot(&z);
    Ok(LpOutcome {
        status: LpStatus::Optimal,
        optimizer: Some(z),
        objective,
    })
}
