//! Polytopes in halfspace form `{x : H x <= h}` and the geometry the
//! synthesis needs: gauge functions, scaling, intersection, Fourier–Motzkin
//! projection, redundancy removal and vertex enumeration.

use std::sync::OnceLock;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::linalg::lin_solve;
use crate::lp::{lp_solve, LpBuilder, LpStatus};
use crate::{serde_util, Error, Matrix, Result, Tolerances, Vector};

/// Coefficients below this magnitude count as zero during elimination.
const ZERO_COEFF: f64 = 1e-12;
/// Normalized rows closer than this (max-norm) are parallel duplicates.
const PARALLEL_TOL: f64 = 1e-9;

/// A convex polytope `{x : H x <= scale · h}`.
///
/// The scale factor is kept separately from the base offsets so that
/// repeated scaling composes exactly: `scale(scale(P, a), b)` and
/// `scale(P, a * b)` have bit-identical offsets.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HPolytope {
    #[serde(with = "serde_util::matrix")]
    h: Matrix,
    #[serde(with = "serde_util::vector")]
    base_offsets: Vector,
    factor: f64,
    #[serde(skip)]
    vertices: OnceLock<Vec<Vector>>,
}

impl PartialEq for HPolytope {
    fn eq(&self, other: &Self) -> bool {
        self.h == other.h && self.offsets() == other.offsets()
    }
}

/// Vertex list of a polytope: no listed point lies in the hull of the others.
#[derive(Debug, Clone, PartialEq)]
pub struct VList(pub Vec<Vector>);

impl VList {
    pub fn as_slice(&self) -> &[Vector] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<Vector> {
        self.0
    }
}

impl HPolytope {
    pub fn new(h: Matrix, offsets: Vector) -> Result<Self> {
        if h.nrows() != offsets.len() {
            return Err(Error::Dimension(format!(
                "H has {} rows but h has {} entries",
                h.nrows(),
                offsets.len()
            )));
        }
        if !h.iter().chain(offsets.iter()).all(|v| v.is_finite()) {
            return Err(Error::Argument("polytope data must be finite".into()));
        }
        Ok(Self {
            h,
            base_offsets: offsets,
            factor: 1.0,
            vertices: OnceLock::new(),
        })
    }

    /// The box `lower <= x <= upper`.
    pub fn from_bounds(lower: &[f64], upper: &[f64]) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::Dimension("bound vectors differ in length".into()));
        }
        let n = lower.len();
        let mut h = Matrix::zeros(2 * n, n);
        let mut offsets = Vector::zeros(2 * n);
        for i in 0..n {
            h[(2 * i, i)] = 1.0;
            offsets[2 * i] = upper[i];
            h[(2 * i + 1, i)] = -1.0;
            offsets[2 * i + 1] = -lower[i];
        }
        Self::new(h, offsets)
    }

    /// The box `|x_i| <= radii[i]`.
    pub fn symmetric_box(radii: &[f64]) -> Result<Self> {
        let lower: Vec<f64> = radii.iter().map(|r| -r).collect();
        Self::from_bounds(&lower, radii)
    }

    pub fn dim(&self) -> usize {
        self.h.ncols()
    }

    pub fn num_constraints(&self) -> usize {
        self.h.nrows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.h
    }

    pub fn offsets(&self) -> Vector {
        if self.factor == 1.0 {
            self.base_offsets.clone()
        } else {
            &self.base_offsets * self.factor
        }
    }

    #[inline]
    fn offset(&self, i: usize) -> f64 {
        self.base_offsets[i] * self.factor
    }

    /// True when every offset exceeds `tol`, i.e. the origin is interior.
    pub fn is_c_set(&self, tol: f64) -> bool {
        (0..self.num_constraints()).all(|i| self.offset(i) > tol)
    }

    fn check_c_set(&self) -> Result<()> {
        match (0..self.num_constraints()).find(|&i| !(self.offset(i) > 0.0)) {
            Some(index) => Err(Error::NotCSet {
                index,
                value: self.offset(index),
            }),
            None => Ok(()),
        }
    }

    fn check_dim(&self, x: &Vector) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::Dimension(format!(
                "point has dimension {}, polytope {}",
                x.len(),
                self.dim()
            )));
        }
        Ok(())
    }

    /// Minkowski gauge `inf{μ >= 0 : x ∈ μP}` of a C-set.
    pub fn gauge(&self, x: &Vector) -> Result<f64> {
        self.check_dim(x)?;
        self.check_c_set()?;
        let hx = &self.h * x;
        Ok((0..hx.len()).map(|i| hx[i] / self.offset(i)).fold(0.0f64, f64::max))
    }

    pub fn contains(&self, x: &Vector, tol: f64) -> Result<bool> {
        self.check_dim(x)?;
        let hx = &self.h * x;
        Ok((0..hx.len()).all(|i| hx[i] <= self.offset(i) + tol))
    }

    /// `{γ x : x ∈ P}`; cached vertices are scaled along.
    pub fn scale(&self, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::Argument(format!("scale factor must be > 0, got {gamma}")));
        }
        let vertices = OnceLock::new();
        if let Some(vs) = self.vertices.get() {
            let _ = vertices.set(vs.iter().map(|v| v * gamma).collect());
        }
        Ok(Self {
            h: self.h.clone(),
            base_offsets: self.base_offsets.clone(),
            factor: self.factor * gamma,
            vertices,
        })
    }

    /// Stacks the two constraint sets and removes redundant rows.
    pub fn intersect(&self, other: &Self, tol: &Tolerances) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension(format!(
                "cannot intersect {}-D and {}-D polytopes",
                self.dim(),
                other.dim()
            )));
        }
        let rows = self.num_constraints() + other.num_constraints();
        let mut h = Matrix::zeros(rows, self.dim());
        h.rows_mut(0, self.num_constraints()).copy_from(&self.h);
        h.rows_mut(self.num_constraints(), other.num_constraints())
            .copy_from(&other.h);
        let offsets = Vector::from_iterator(rows, self.offsets().iter().chain(other.offsets().iter()).copied());
        Self::new(h, offsets)?.reduce(tol)
    }

    /// Support value `max{d·x : x ∈ P}`; `None` when unbounded in `d`.
    pub fn support(&self, direction: &Vector, tol: &Tolerances) -> Result<Option<f64>> {
        self.check_dim(direction)?;
        let mut lp = LpBuilder::new(self.dim());
        for k in 0..self.dim() {
            lp.set_objective(k, -direction[k]);
        }
        self.push_rows(&mut lp, None);
        let out = lp_solve(&lp.build(), tol.feas_tol)?;
        match out.status {
            LpStatus::Optimal => Ok(Some(-out.objective)),
            LpStatus::Unbounded => Ok(None),
            LpStatus::Infeasible => Err(Error::Empty),
        }
    }

    fn push_rows(&self, lp: &mut LpBuilder, skip: Option<&[bool]>) {
        for i in 0..self.num_constraints() {
            if skip.is_some_and(|s| s[i]) {
                continue;
            }
            let row: Vec<f64> = self.h.row(i).iter().copied().collect();
            lp.le(&row, self.offset(i));
        }
    }

    pub fn is_empty(&self, tol: &Tolerances) -> Result<bool> {
        let mut lp = LpBuilder::new(self.dim());
        self.push_rows(&mut lp, None);
        Ok(lp_solve(&lp.build(), tol.feas_tol)?.status == LpStatus::Infeasible)
    }

    /// Removes redundant rows without changing the feasible set.
    ///
    /// Rows are first normalized to unit length and parallel duplicates
    /// collapsed to the tightest one. A row is then dropped when its support
    /// over the remaining rows does not exceed its offset by more than
    /// `red_tol`.
    pub fn reduce(&self, tol: &Tolerances) -> Result<Self> {
        let n = self.dim();
        let mut rows: Vec<(Vec<f64>, f64)> = Vec::with_capacity(self.num_constraints());
        for i in 0..self.num_constraints() {
            let norm = self.h.row(i).norm();
            let off = self.offset(i);
            if norm < ZERO_COEFF {
                if off < -tol.mem_tol {
                    return Err(Error::Empty);
                }
                continue;
            }
            let coeffs: Vec<f64> = self.h.row(i).iter().map(|v| v / norm).collect();
            let off = off / norm;
            match rows
                .iter_mut()
                .find(|(c, _)| c.iter().zip(&coeffs).all(|(a, b)| (a - b).abs() <= PARALLEL_TOL))
            {
                Some(existing) => existing.1 = existing.1.min(off),
                None => rows.push((coeffs, off)),
            }
        }

        let mut feas = LpBuilder::new(n);
        for (c, off) in &rows {
            feas.le(c, *off);
        }
        if lp_solve(&feas.build(), tol.feas_tol)?.status == LpStatus::Infeasible {
            return Err(Error::Empty);
        }

        let mut removed = vec![false; rows.len()];
        for i in 0..rows.len() {
            let mut lp = LpBuilder::new(n);
            for (k, (c, off)) in rows.iter().enumerate() {
                if k != i && !removed[k] {
                    lp.le(c, *off);
                }
            }
            // Caps the LP so unbounded directions read as "irredundant".
            lp.le(&rows[i].0, rows[i].1 + 1.0);
            for (k, &c) in rows[i].0.iter().enumerate() {
                lp.set_objective(k, -c);
            }
            let out = lp_solve(&lp.build(), tol.feas_tol)?;
            if out.status == LpStatus::Optimal && -out.objective <= rows[i].1 + tol.red_tol {
                removed[i] = true;
            }
        }

        let kept: Vec<&(Vec<f64>, f64)> = rows
            .iter()
            .zip(&removed)
            .filter(|(_, &r)| !r)
            .map(|(row, _)| row)
            .collect();
        let h = Matrix::from_fn(kept.len(), n, |i, k| kept[i].0[k]);
        let offsets = Vector::from_iterator(kept.len(), kept.iter().map(|r| r.1));
        Self::new(h, offsets)
    }

    /// Fourier–Motzkin elimination of the last `count` coordinates, with
    /// redundancy removal after each eliminated coordinate.
    pub fn project_out(&self, count: usize, tol: &Tolerances) -> Result<Self> {
        if count > self.dim() {
            return Err(Error::Argument(format!(
                "cannot eliminate {count} of {} coordinates",
                self.dim()
            )));
        }
        let mut current = self.reduce(tol)?;
        for _ in 0..count {
            current = current.eliminate_last()?.reduce(tol)?;
        }
        Ok(current)
    }

    fn eliminate_last(&self) -> Result<Self> {
        let n = self.dim();
        let last = n - 1;
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut new_rows: Vec<(Vec<f64>, f64)> = Vec::new();
        for i in 0..self.num_constraints() {
            let c = self.h[(i, last)];
            if c > ZERO_COEFF {
                pos.push(i);
            } else if c < -ZERO_COEFF {
                neg.push(i);
            } else {
                let coeffs = (0..last).map(|k| self.h[(i, k)]).collect();
                new_rows.push((coeffs, self.offset(i)));
            }
        }
        for &p in &pos {
            let cp = self.h[(p, last)];
            for &q in &neg {
                let cq = -self.h[(q, last)];
                let coeffs = (0..last).map(|k| self.h[(p, k)] / cp + self.h[(q, k)] / cq).collect();
                new_rows.push((coeffs, self.offset(p) / cp + self.offset(q) / cq));
            }
        }
        let h = Matrix::from_fn(new_rows.len(), last, |i, k| new_rows[i].0[k]);
        let offsets = Vector::from_iterator(new_rows.len(), new_rows.iter().map(|r| r.1));
        Self::new(h, offsets)
    }

    /// Axis-aligned bounding box `(lower, upper)`.
    pub fn bounding_box(&self, tol: &Tolerances) -> Result<(Vector, Vector)> {
        let n = self.dim();
        let mut lower = Vector::zeros(n);
        let mut upper = Vector::zeros(n);
        for k in 0..n {
            let mut e = Vector::zeros(n);
            e[k] = 1.0;
            upper[k] = self.support(&e, tol)?.ok_or(Error::Unbounded)?;
            e[k] = -1.0;
            lower[k] = -self.support(&e, tol)?.ok_or(Error::Unbounded)?;
        }
        Ok((lower, upper))
    }

    /// Vertices by basis enumeration over all `dim`-subsets of rows; suited
    /// to low dimensions and a few dozen rows.
    pub fn enumerate_vertices(&self, tol: &Tolerances) -> Result<VList> {
        let n = self.dim();
        self.bounding_box(tol)?;
        let offsets = self.offsets();
        let mut points: Vec<Vector> = Vec::new();
        for subset in (0..self.num_constraints()).combinations(n) {
            let sub = Matrix::from_fn(n, n, |i, k| self.h[(subset[i], k)]);
            let rhs = Vector::from_fn(n, |i, _| offsets[subset[i]]);
            let Some(v) = lin_solve(&sub, &rhs, tol.singular_tol) else {
                continue;
            };
            if !self.contains(&v, tol.mem_tol)? {
                continue;
            }
            if points.iter().any(|p| (p - &v).amax() <= tol.dedupe_tol) {
                continue;
            }
            points.push(v);
        }
        let mut i = 0;
        while i < points.len() && points.len() > n + 1 {
            let others: Vec<Vector> = points
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != i)
                .map(|(_, p)| p.clone())
                .collect();
            if convex_weights(&others, &points[i], tol.dedupe_tol, tol)?.is_some() {
                points.remove(i);
            } else {
                i += 1;
            }
        }
        sort_vertices(&mut points);
        Ok(VList(points))
    }

    /// Cached vertex list, computed on first use.
    pub fn vertices(&self, tol: &Tolerances) -> Result<&[Vector]> {
        if let Some(vs) = self.vertices.get() {
            return Ok(vs);
        }
        let vs = self.enumerate_vertices(tol)?.into_inner();
        let _ = self.vertices.set(vs);
        Ok(self.vertices.get().expect("just published"))
    }

    /// Seeds the vertex cache with a known vertex list.
    pub fn with_vertices(self, vertices: Vec<Vector>) -> Self {
        let cache = OnceLock::new();
        let _ = cache.set(vertices);
        Self {
            vertices: cache,
            ..self
        }
    }

    /// True when every vertex of `self` lies in `other` within `mem_tol`.
    pub fn is_subset_of(&self, other: &Self, tol: &Tolerances) -> Result<bool> {
        for v in self.vertices(tol)? {
            if !other.contains(v, tol.mem_tol)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Orders 2-D vertices counter-clockwise around their centroid and higher
/// dimensional ones lexicographically.
fn sort_vertices(points: &mut [Vector]) {
    if points.is_empty() {
        return;
    }
    if points[0].len() == 2 {
        let cx = points.iter().map(|p| p[0]).sum::<f64>() / points.len() as f64;
        let cy = points.iter().map(|p| p[1]).sum::<f64>() / points.len() as f64;
        points.sort_by(|a, b| {
            let ta = (a[1] - cy).atan2(a[0] - cx);
            let tb = (b[1] - cy).atan2(b[0] - cx);
            ta.total_cmp(&tb)
        });
    } else {
        points.sort_by(|a, b| {
            a.iter()
                .zip(b.iter())
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
    }
}

/// Weights `μ >= 0, Σμ = 1` with `|Σ μ_n p_n − x|_∞ <= slack`, if any exist.
pub fn convex_weights(points: &[Vector], x: &Vector, slack: f64, tol: &Tolerances) -> Result<Option<Vector>> {
    let count = points.len();
    if count == 0 {
        return Ok(None);
    }
    let n = x.len();
    if points.iter().any(|p| p.len() != n) {
        return Err(Error::Dimension("hull points and query differ in dimension".into()));
    }
    let mut lp = LpBuilder::new(count);
    for m in 0..count {
        lp.le_terms(&[(m, -1.0)], 0.0);
    }
    let ones = vec![1.0; count];
    lp.eq(&ones, 1.0);
    for k in 0..n {
        let row: Vec<f64> = points.iter().map(|p| p[k]).collect();
        let neg: Vec<f64> = row.iter().map(|v| -v).collect();
        lp.le(&row, x[k] + slack);
        lp.le(&neg, -x[k] + slack);
    }
    let out = lp_solve(&lp.build(), tol.feas_tol)?;
    Ok(match out.status {
        LpStatus::Optimal => out.optimizer,
        _ => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{matrix_from_rows, vector};
    use approx::assert_relative_eq;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn box2(r: f64) -> HPolytope {
        HPolytope::symmetric_box(&[r, r]).unwrap()
    }

    fn same_set(p: &HPolytope, q: &HPolytope) -> bool {
        p.is_subset_of(q, &tol()).unwrap() && q.is_subset_of(p, &tol()).unwrap()
    }

    #[test]
    fn gauge_examples() {
        let p = box2(0.2);
        assert_eq!(p.gauge(&vector(&[0.0, 0.0])).unwrap(), 0.0);
        assert_relative_eq!(p.gauge(&vector(&[0.1, 0.0])).unwrap(), 0.5, epsilon = 1e-15);
        for v in p.vertices(&tol()).unwrap() {
            assert!((p.gauge(v).unwrap() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn gauge_requires_c_set() {
        let p = HPolytope::from_bounds(&[0.0], &[1.0]).unwrap();
        assert!(matches!(p.gauge(&vector(&[0.5])), Err(Error::NotCSet { index: 1, .. })));
    }

    #[test]
    fn contains_examples() {
        let p = box2(0.2);
        let t = tol().mem_tol;
        assert!(p.contains(&vector(&[0.0, 0.0]), t).unwrap());
        assert!(!p.contains(&vector(&[0.2 + 2.0 * t, 0.0]), t).unwrap());
        assert!(p.contains(&vector(&[0.2, 0.2]), t).unwrap());
        assert!(matches!(p.contains(&vector(&[0.0]), t), Err(Error::Dimension(_))));
    }

    #[test]
    fn scale_examples() {
        let p = box2(0.2);
        assert_eq!(p.scale(1.0).unwrap(), p);
        assert_eq!(p.scale(2.0).unwrap().offsets(), box2(0.4).offsets());
        assert!(matches!(p.scale(0.0), Err(Error::Argument(_))));
        assert!(matches!(p.scale(-1.0), Err(Error::Argument(_))));
    }

    #[test]
    fn scale_carries_vertex_cache() {
        let p = box2(0.2);
        p.vertices(&tol()).unwrap();
        let q = p.scale(3.0).unwrap();
        let vs = q.vertices.get().expect("cache carried over");
        assert!(vs.iter().all(|v| (v.amax() - 0.6).abs() < 1e-12));
    }

    #[test]
    fn intersect_with_itself() {
        let p = box2(1.0);
        let q = p.intersect(&p, &tol()).unwrap();
        assert_eq!(q.num_constraints(), 4);
        assert!(same_set(&p, &q));
    }

    #[test]
    fn intersect_nested_boxes() {
        let q = box2(1.0).intersect(&box2(0.5), &tol()).unwrap();
        assert_eq!(q.num_constraints(), 4);
        assert!(same_set(&q, &box2(0.5)));
    }

    #[test]
    fn intersect_with_halfplane() {
        let half = HPolytope::new(matrix_from_rows(&[&[1.0, 0.0]]), vector(&[0.0])).unwrap();
        let q = box2(1.0).intersect(&half, &tol()).unwrap();
        let want = HPolytope::from_bounds(&[-1.0, -1.0], &[0.0, 1.0]).unwrap();
        assert!(same_set(&q, &want));
        assert_eq!(q.num_constraints(), 4);
    }

    #[test]
    fn intersect_dimension_mismatch() {
        let err = box2(1.0).intersect(&HPolytope::symmetric_box(&[1.0]).unwrap(), &tol());
        assert!(matches!(err, Err(Error::Dimension(_))));
    }

    #[test]
    fn reduce_drops_duplicate_row() {
        let h = matrix_from_rows(&[&[1.0, 0.0], &[1.0, 0.0], &[-1.0, 0.0], &[0.0, 1.0], &[0.0, -1.0]]);
        let p = HPolytope::new(h, vector(&[1.0, 1.0, 1.0, 1.0, 1.0])).unwrap();
        assert_eq!(p.reduce(&tol()).unwrap().num_constraints(), 4);
    }

    #[test]
    fn reduce_keeps_tighter_bound() {
        let h = matrix_from_rows(&[&[1.0], &[1.0], &[-1.0]]);
        let p = HPolytope::new(h, vector(&[1.0, 2.0, 5.0])).unwrap();
        let r = p.reduce(&tol()).unwrap();
        assert_eq!(r.num_constraints(), 2);
        assert_eq!(r.support(&vector(&[1.0]), &tol()).unwrap(), Some(1.0));
        assert_eq!(r.support(&vector(&[-1.0]), &tol()).unwrap(), Some(5.0));
    }

    #[test]
    fn reduce_drops_touching_row() {
        // x + y <= 2 only touches the unit box at a corner.
        let h = matrix_from_rows(&[&[1.0, 0.0], &[-1.0, 0.0], &[0.0, 1.0], &[0.0, -1.0], &[1.0, 1.0]]);
        let p = HPolytope::new(h, vector(&[1.0, 1.0, 1.0, 1.0, 2.0])).unwrap();
        assert_eq!(p.reduce(&tol()).unwrap().num_constraints(), 4);
    }

    #[test]
    fn reduce_detects_empty() {
        let h = matrix_from_rows(&[&[1.0], &[-1.0]]);
        let p = HPolytope::new(h, vector(&[0.0, -1.0])).unwrap();
        assert_eq!(p.reduce(&tol()), Err(Error::Empty));
    }

    #[test]
    fn project_out_hand_example() {
        // {x + u <= 1, -u <= 0, u <= 1} over (x, u), eliminate u -> {x <= 1}
        let h = matrix_from_rows(&[&[1.0, 1.0], &[0.0, -1.0], &[0.0, 1.0]]);
        let p = HPolytope::new(h, vector(&[1.0, 0.0, 1.0])).unwrap();
        let q = p.project_out(1, &tol()).unwrap();
        assert_eq!(q.dim(), 1);
        assert_eq!(q.num_constraints(), 1);
        assert_relative_eq!(q.matrix()[(0, 0)], 1.0);
        assert_relative_eq!(q.offsets()[0], 1.0);
    }

    #[test]
    fn project_out_independent_coordinate() {
        // 2-D box in x times |u| <= 3.
        let p = HPolytope::from_bounds(&[-1.0, -2.0, -3.0], &[1.0, 2.0, 3.0]).unwrap();
        let q = p.project_out(1, &tol()).unwrap();
        assert!(same_set(
            &q,
            &HPolytope::from_bounds(&[-1.0, -2.0], &[1.0, 2.0]).unwrap()
        ));
        assert_eq!(q.num_constraints(), 4);
    }

    #[test]
    fn box_vertices() {
        let vs = box2(0.2).enumerate_vertices(&tol()).unwrap();
        assert_eq!(vs.len(), 4);
        for v in vs.as_slice() {
            assert!((v[0].abs() - 0.2).abs() < 1e-15 && (v[1].abs() - 0.2).abs() < 1e-15);
        }
    }

    #[test]
    fn interval_vertices() {
        let p = HPolytope::symmetric_box(&[0.1]).unwrap();
        let vs = p.enumerate_vertices(&tol()).unwrap();
        let mut xs: Vec<f64> = vs.as_slice().iter().map(|v| v[0]).collect();
        xs.sort_by(f64::total_cmp);
        assert_eq!(xs, vec![-0.1, 0.1]);
    }

    #[test]
    fn unbounded_vertex_enumeration() {
        let h = matrix_from_rows(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let p = HPolytope::new(h, vector(&[1.0, 1.0])).unwrap();
        assert_eq!(p.enumerate_vertices(&tol()), Err(Error::Unbounded));
    }

    #[test]
    fn degenerate_vertex_is_listed_once() {
        // Three facets through (1, 1).
        let h = matrix_from_rows(&[&[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0], &[-1.0, 0.0], &[0.0, -1.0]]);
        let p = HPolytope::new(h, vector(&[1.0, 1.0, 2.0, 1.0, 1.0])).unwrap();
        assert_eq!(p.enumerate_vertices(&tol()).unwrap().len(), 4);
    }

    #[test]
    fn bounding_box_of_triangle() {
        let h = matrix_from_rows(&[&[-1.0, 0.0], &[0.0, -1.0], &[1.0, 1.0]]);
        let p = HPolytope::new(h, vector(&[0.0, 0.0, 1.0])).unwrap();
        let (lo, hi) = p.bounding_box(&tol()).unwrap();
        assert_relative_eq!(lo, vector(&[0.0, 0.0]), epsilon = 1e-12);
        assert_relative_eq!(hi, vector(&[1.0, 1.0]), epsilon = 1e-12);
    }
}
