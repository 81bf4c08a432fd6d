use crate::error::{check_dim, Error, Result};
use crate::linalg::{self, Matrix, Vector};
use crate::lp::{LinearProgram, LpRow, Relation};

/// Compact convex action set `{x ∈ R^T : P x ≤ b, Q x = e}`.
///
/// Construction runs the LP checks: the set must be nonempty and bounded. The
/// bounding radius `R` satisfies `‖x‖ ≤ R` for every member and is obtained from
/// the coordinate-wise extent of the set.
#[derive(Debug, Clone, PartialEq)]
pub struct PolytopeSet {
    ineq: Matrix,
    ineq_rhs: Vector,
    eq: Matrix,
    eq_rhs: Vector,
    radius: f64,
}

impl PolytopeSet {
    pub fn new(p: Matrix, b: Vector) -> Result<Self> {
        let dim = p.ncols();
        Self::with_equalities(p, b, Matrix::zeros(0, dim), Vector::zeros(0))
    }

    pub fn with_equalities(p: Matrix, b: Vector, q: Matrix, e: Vector) -> Result<Self> {
        check_dim(p.nrows(), b.len())?;
        check_dim(q.nrows(), e.len())?;
        check_dim(p.ncols(), q.ncols())?;
        if p.ncols() == 0 {
            return Err(Error::contract("polytope must live in a space of positive dimension"));
        }
        let mut set = PolytopeSet {
            ineq: p,
            ineq_rhs: b,
            eq: q,
            eq_rhs: e,
            radius: 0.0,
        };
        let (lo, hi) = set.coordinate_extent()?;
        set.radius = lo
            .iter()
            .zip(hi.iter())
            .map(|(l, h)| l.abs().max(h.abs()).powi(2))
            .sum::<f64>()
            .sqrt();
        Ok(set)
    }

    /// `[lo, hi] ⊂ R`.
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::hyperbox(&[lo], &[hi])
    }

    pub fn hyperbox(lo: &[f64], hi: &[f64]) -> Result<Self> {
        check_dim(lo.len(), hi.len())?;
        let t = lo.len();
        let mut p = Matrix::zeros(2 * t, t);
        let mut b = Vector::zeros(2 * t);
        for k in 0..t {
            p[(k, k)] = 1.0;
            b[k] = hi[k];
            p[(t + k, k)] = -1.0;
            b[t + k] = -lo[k];
        }
        Self::new(p, b)
    }

    /// `{x ≥ 0 : Σ x = total}` in `R^dim`.
    pub fn simplex(dim: usize, total: f64) -> Result<Self> {
        let p = -Matrix::identity(dim, dim);
        let b = Vector::zeros(dim);
        let q = Matrix::from_element(1, dim, 1.0);
        let e = Vector::from_element(1, total);
        Self::with_equalities(p, b, q, e)
    }

    /// Same constraint matrices, new right-hand sides.
    pub fn with_rhs(&self, b: Vector, e: Vector) -> Result<Self> {
        Self::with_equalities(self.ineq.clone(), b, self.eq.clone(), e)
    }

    /// Same constraint matrices and new right-hand sides without the LP checks;
    /// the radius is carried over from `self`. For probing sets known to be
    /// nonempty (e.g. members of a characteristic).
    pub(crate) fn with_rhs_unchecked(&self, b: Vector, e: Vector) -> Self {
        PolytopeSet {
            ineq: self.ineq.clone(),
            ineq_rhs: b,
            eq: self.eq.clone(),
            eq_rhs: e,
            radius: self.radius,
        }
    }

    pub fn dim(&self) -> usize {
        self.ineq.ncols()
    }

    pub fn p(&self) -> &Matrix {
        &self.ineq
    }

    pub fn b(&self) -> &Vector {
        &self.ineq_rhs
    }

    pub fn q(&self) -> &Matrix {
        &self.eq
    }

    pub fn e(&self) -> &Vector {
        &self.eq_rhs
    }

    pub fn num_constraints(&self) -> usize {
        self.ineq.nrows() + self.eq.nrows()
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Right-hand sides stacked as `(b, e)`.
    pub fn rhs(&self) -> Vector {
        let mut v = Vector::zeros(self.ineq_rhs.len() + self.eq_rhs.len());
        v.rows_mut(0, self.ineq_rhs.len()).copy_from(&self.ineq_rhs);
        v.rows_mut(self.ineq_rhs.len(), self.eq_rhs.len())
            .copy_from(&self.eq_rhs);
        v
    }

    /// Magnitude used to turn absolute tolerances into relative ones.
    pub fn scale(&self) -> f64 {
        1.0 + self.radius
    }

    /// Euclidean norm of the constraint violation `(‖(Px − b)₊‖² + ‖Qx − e‖²)^½`.
    pub fn violation(&self, x: &Vector) -> f64 {
        let ineq = (&self.ineq * x - &self.ineq_rhs).map(|v| v.max(0.0));
        let eq = &self.eq * x - &self.eq_rhs;
        (ineq.norm_squared() + eq.norm_squared()).sqrt()
    }

    pub fn contains(&self, x: &Vector, tol: f64) -> bool {
        x.len() == self.dim() && self.violation(x) <= tol
    }

    /// Orthonormal basis of the direction space of the affine hull `{Qx = e}`.
    pub fn hull_directions(&self) -> Matrix {
        linalg::null_space(&self.eq, self.dim())
    }

    pub(crate) fn lp_rows(&self, offset: usize) -> Vec<LpRow> {
        let mut rows = Vec::with_capacity(self.num_constraints());
        for k in 0..self.ineq.nrows() {
            let coeffs: Vec<f64> = self.ineq.row(k).iter().copied().collect();
            rows.push(LpRow::dense(&coeffs, offset, Relation::Le, self.ineq_rhs[k]));
        }
        for k in 0..self.eq.nrows() {
            let coeffs: Vec<f64> = self.eq.row(k).iter().copied().collect();
            rows.push(LpRow::dense(&coeffs, offset, Relation::Eq, self.eq_rhs[k]));
        }
        rows
    }

    fn coordinate_extent(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let t = self.dim();
        let mut lp = LinearProgram::new(t);
        for row in self.lp_rows(0) {
            lp.push(row);
        }
        lp.feasible_point()?;
        let mut lo = vec![0.0; t];
        let mut hi = vec![0.0; t];
        let mut obj = vec![0.0; t];
        for k in 0..t {
            obj[k] = 1.0;
            hi[k] = lp.maximize(&obj)?[k];
            obj[k] = -1.0;
            lo[k] = lp.maximize(&obj)?[k];
            obj[k] = 0.0;
        }
        Ok((lo, hi))
    }

    /// Chebyshev center and radius of the set inside its affine hull.
    pub fn chebyshev(&self) -> Result<(Vector, f64)> {
        let t = self.dim();
        let dirs = self.hull_directions();
        if dirs.ncols() == 0 {
            return Err(Error::DegenerateInterior(
                "affine hull of the action set is a single point".into(),
            ));
        }
        let mut lp = LinearProgram::new(t + 1);
        lp.bounds[t] = (0.0, f64::INFINITY);
        for k in 0..self.ineq.nrows() {
            let row = linalg::row(&self.ineq, k);
            let mut coeffs: Vec<f64> = row.iter().copied().collect();
            coeffs.push(linalg::projected_norm(&row, &dirs));
            lp.push(LpRow::dense(&coeffs, 0, Relation::Le, self.ineq_rhs[k]));
        }
        for k in 0..self.eq.nrows() {
            let coeffs: Vec<f64> = self.eq.row(k).iter().copied().collect();
            lp.push(LpRow::dense(&coeffs, 0, Relation::Eq, self.eq_rhs[k]));
        }
        let mut obj = vec![0.0; t + 1];
        obj[t] = 1.0;
        let sol = lp.maximize(&obj)?;
        Ok((Vector::from_column_slice(&sol[..t]), sol[t]))
    }

    /// Vertices together with the indices of the constraint rows defining each one
    /// (inequality rows first, then equality rows offset by `q`).
    pub fn vertex_bases(&self) -> Vec<(Vector, Vec<usize>)> {
        let t = self.dim();
        let q_rows = self.ineq.nrows();
        let tol = 1e-9 * self.scale();

        let eq_rows = self.independent_eq_rows();
        if eq_rows.len() > t {
            return Vec::new();
        }
        let need = t - eq_rows.len();
        let mut out: Vec<(Vector, Vec<usize>)> = Vec::new();
        for combo in combinations(q_rows, need) {
            let b_mat = self.select_rows(&combo, &eq_rows);
            let lu = b_mat.clone().lu();
            if !lu.is_invertible() || linalg::rank(&b_mat) < t {
                continue;
            }
            let mut rhs = Vector::zeros(t);
            for (i, &k) in combo.iter().enumerate() {
                rhs[i] = self.ineq_rhs[k];
            }
            for (i, &k) in eq_rows.iter().enumerate() {
                rhs[combo.len() + i] = self.eq_rhs[k];
            }
            let Some(v) = lu.solve(&rhs) else { continue };
            if self.violation(&v) > tol {
                continue;
            }
            if out.iter().any(|(w, _)| (w - &v).norm() <= tol) {
                continue;
            }
            let mut basis = combo.clone();
            basis.extend(eq_rows.iter().map(|k| k + q_rows));
            out.push((v, basis));
        }
        out
    }

    /// `max ‖B⁻¹‖₂` over the nonsingular square row selections `B` of `[P; Q]`
    /// that contain an independent set of equality rows. Vertices of two sets
    /// sharing a basis move by at most this factor times the change of the
    /// right-hand side, which is the constant used to bound Hausdorff distances
    /// between same-shape polytopes.
    pub fn hoffman_estimate(&self) -> f64 {
        let t = self.dim();
        let eq_rows = self.independent_eq_rows();
        if eq_rows.len() > t {
            return 0.0;
        }
        let mut best: f64 = 0.0;
        for combo in combinations(self.ineq.nrows(), t - eq_rows.len()) {
            let b_mat = self.select_rows(&combo, &eq_rows);
            if linalg::rank(&b_mat) < t {
                continue;
            }
            if let Some(inv) = b_mat.try_inverse() {
                best = best.max(linalg::spectral_norm(&inv));
            }
        }
        best
    }

    fn independent_eq_rows(&self) -> Vec<usize> {
        let mut eq_rows: Vec<usize> = Vec::new();
        for k in 0..self.eq.nrows() {
            let mut trial = eq_rows.clone();
            trial.push(k);
            if linalg::rank(&self.select_rows(&[], &trial)) == trial.len() {
                eq_rows = trial;
            }
        }
        eq_rows
    }

    pub fn vertices(&self) -> Vec<Vector> {
        self.vertex_bases().into_iter().map(|(v, _)| v).collect()
    }

    /// Square submatrix formed from the listed rows (inequality indices refer to
    /// `P`, equality indices to `Q`).
    fn select_rows(&self, ineq_rows: &[usize], eq_rows: &[usize]) -> Matrix {
        let t = self.dim();
        let mut m = Matrix::zeros(ineq_rows.len() + eq_rows.len(), t);
        for (i, &k) in ineq_rows.iter().enumerate() {
            m.row_mut(i).copy_from(&self.ineq.row(k));
        }
        for (i, &k) in eq_rows.iter().enumerate() {
            m.row_mut(ineq_rows.len() + i).copy_from(&self.eq.row(k));
        }
        m
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        // rightmost position that can still advance
        let mut i = k;
        while i > 0 && idx[i - 1] == i - 1 + n - k {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
