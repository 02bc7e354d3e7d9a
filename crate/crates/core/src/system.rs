use serde::{Deserialize, Serialize};

use crate::linalg::{is_finite, power_sum};
use crate::{serde_util, Error, HPolytope, Matrix, Result, Vector};

/// `x(k+1) = A x(k) + B u(k)` with `x ∈ X`, `u ∈ U`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSystem {
    #[serde(with = "serde_util::matrix")]
    pub a: Matrix,
    #[serde(with = "serde_util::matrix")]
    pub b: Matrix,
    pub state_set: HPolytope,
    pub input_set: HPolytope,
}

impl LinearSystem {
    pub fn new(a: Matrix, b: Matrix, state_set: HPolytope, input_set: HPolytope) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Dimension(format!(
                "A must be square, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        if b.nrows() != a.nrows() {
            return Err(Error::Dimension(format!(
                "B has {} rows, A has {}",
                b.nrows(),
                a.nrows()
            )));
        }
        if state_set.dim() != a.nrows() || input_set.dim() != b.ncols() {
            return Err(Error::Dimension(format!(
                "constraint sets are {}-D / {}-D for a system with n = {}, m = {}",
                state_set.dim(),
                input_set.dim(),
                a.nrows(),
                b.ncols()
            )));
        }
        if !is_finite(&a) || !is_finite(&b) {
            return Err(Error::Argument("system matrices must be finite".into()));
        }
        Ok(Self {
            a,
            b,
            state_set,
            input_set,
        })
    }

    pub fn state_dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn input_dim(&self) -> usize {
        self.b.ncols()
    }

    pub fn step(&self, x: &Vector, u: &Vector) -> Vector {
        &self.a * x + &self.b * u
    }

    /// `(A^j, Σ_{i=1}^{j} A^{i-1} B)` for holding an input `j` steps.
    pub fn hold_maps(&self, j: usize) -> Result<(Matrix, Matrix)> {
        power_sum(&self.a, &self.b, j)
    }

    /// Hold maps for every `i = 1..=j`.
    pub fn hold_maps_upto(&self, j: usize) -> Vec<(Matrix, Matrix)> {
        let mut out = Vec::with_capacity(j);
        let mut power = self.a.clone();
        let mut sum = self.b.clone();
        for _ in 0..j {
            out.push((power.clone(), sum.clone()));
            sum += &power * &self.b;
            power = &self.a * power;
        }
        out
    }
}
