//! Dense complex matrices and the tolerance policy shared by every stage.
//!
//! All thresholds are relative: a tolerance is always multiplied by a norm
//! estimate of the matrix it is applied to before being compared against
//! anything.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Largest supported operator dimension.
pub const MAX_DIM: usize = 32;

const SCHUR_MAX_ITER: usize = 10_000;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Relative tolerances consulted by the decomposition, classification and
/// certificate checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TolerancePolicy {
    /// Two computed eigenvalues closer than `eig_cluster_tol * ‖H‖` are the same eigenvalue.
    pub eig_cluster_tol: f64,
    /// Singular values below `rank_tol * σ_max` count as zero.
    pub rank_tol: f64,
    /// Bound on relative residuals of every certificate.
    pub residual_tol: f64,
    /// Eigenvalues with `|Im E| <= realness_tol * ‖H‖` are real.
    pub realness_tol: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        TolerancePolicy {
            eig_cluster_tol: 1e-6,
            rank_tol: 1e-8,
            residual_tol: 1e-9,
            realness_tol: 1e-8,
        }
    }
}

impl TolerancePolicy {
    pub fn new(eig_cluster_tol: f64, rank_tol: f64, residual_tol: f64, realness_tol: f64) -> Result<Self> {
        let policy = TolerancePolicy {
            eig_cluster_tol,
            rank_tol,
            residual_tol,
            realness_tol,
        };
        policy.validate()?;
        Ok(policy)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("eig_cluster_tol", self.eig_cluster_tol),
            ("rank_tol", self.rank_tol),
            ("residual_tol", self.residual_tol),
            ("realness_tol", self.realness_tol),
        ] {
            if !(value > 0.0 && value < 1.0) {
                return Err(Error::InvalidTolerance { name, value });
            }
        }
        Ok(())
    }
}

/// Dense square-or-rectangular complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix {}x{} [", self.rows(), self.cols())?;
        for i in 0..self.rows() {
            write!(f, "\n  ")?;
            for j in 0..self.cols() {
                let z = self.0[(i, j)];
                write!(f, "{:>10.4}{:+.4}i ", z.re, z.im)?;
            }
        }
        write!(f, "\n]")
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        ComplexMatrix(DMatrix::identity(n, n))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        ComplexMatrix(DMatrix::from_fn(rows, cols, f))
    }

    /// Builds a matrix from row-major data.
    pub fn from_row_slice(rows: usize, cols: usize, data: &[C64]) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(ComplexMatrix(DMatrix::from_row_slice(rows, cols, data)))
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let r = rows.len();
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|row| row.len() != cols) {
            return Err(Error::DimensionMismatch(format!(
                "row {bad} has {} entries, expected {cols}",
                rows[bad].len()
            )));
        }
        Ok(ComplexMatrix(DMatrix::from_fn(r, cols, |i, j| rows[i][j])))
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows.iter().map(|r| r.iter().map(|&x| re(x)).collect()).collect();
        Self::from_rows(&rows)
    }

    pub fn diagonal(values: &[C64]) -> Self {
        let n = values.len();
        ComplexMatrix::from_fn(n, n, |i, j| if i == j { values[i] } else { C64::default() })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(n: usize, columns: &[Vec<C64>]) -> Result<Self> {
        if let Some(bad) = columns.iter().position(|col| col.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "column {bad} has length {}, expected {n}",
                columns[bad].len()
            )));
        }
        Ok(ComplexMatrix::from_fn(n, columns.len(), |i, j| columns[j][i]))
    }

    pub fn from_nalgebra(m: DMatrix<C64>) -> Self {
        ComplexMatrix(m)
    }

    pub fn as_nalgebra(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_nalgebra(self) -> DMatrix<C64> {
        self.0
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: C64) {
        self.0[(i, j)] = value;
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        self.0.column(j).iter().copied().collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<C64>> {
        (0..self.rows())
            .map(|i| (0..self.cols()).map(|j| self.0[(i, j)]).collect())
            .collect()
    }

    /// Entries in row-major order.
    pub fn row_major(&self) -> Vec<C64> {
        self.to_rows().into_iter().flatten().collect()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn conj(&self) -> Self {
        ComplexMatrix(self.0.map(|z| z.conj()))
    }

    pub fn transpose(&self) -> Self {
        ComplexMatrix(self.0.transpose())
    }

    pub fn adjoint(&self) -> Self {
        ComplexMatrix(self.0.adjoint())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn scale(&self, s: C64) -> Self {
        ComplexMatrix(&self.0 * s)
    }

    /// Frobenius norm; the operator-norm estimate used for relative scaling.
    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    /// Spectral norm (largest singular value).
    pub fn op_norm(&self) -> f64 {
        singular_values(self).first().copied().unwrap_or(0.0)
    }

    pub fn max_abs_imag(&self) -> f64 {
        self.0.iter().fold(0.0, |m, z| m.max(z.im.abs()))
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.cols(), "vector length mismatch");
        (0..self.rows())
            .map(|i| (0..self.cols()).map(|j| self.0[(i, j)] * v[j]).sum())
            .collect()
    }

    /// Columns `idx` of `self`, in the given order.
    pub fn select_columns(&self, idx: &[usize]) -> Self {
        ComplexMatrix::from_fn(self.rows(), idx.len(), |i, j| self.0[(i, idx[j])])
    }

    /// Horizontal concatenation.
    pub fn hstack(&self, other: &ComplexMatrix) -> Result<Self> {
        if self.rows() != other.rows() {
            return Err(Error::DimensionMismatch(format!(
                "hstack of {} and {} rows",
                self.rows(),
                other.rows()
            )));
        }
        let k = self.cols();
        Ok(ComplexMatrix::from_fn(self.rows(), k + other.cols(), |i, j| {
            if j < k {
                self.0[(i, j)]
            } else {
                other.0[(i, j - k)]
            }
        }))
    }

    pub fn sub_matrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        ComplexMatrix(self.0.view((r0, c0), (rows, cols)).into_owned())
    }

    pub fn hermitian_part(&self) -> Self {
        ComplexMatrix((&self.0 + self.0.adjoint()) * re(0.5))
    }

    /// Integer power by repeated multiplication.
    pub fn pow(&self, k: usize) -> Self {
        let mut out = ComplexMatrix::identity(self.rows());
        for _ in 0..k {
            out = &out * self;
        }
        out
    }
}

pub(crate) fn check_square(a: &ComplexMatrix) -> Result<usize> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    Ok(a.rows())
}

/// Validates an operator: square, finite, and within the supported size.
pub fn check_operator(a: &ComplexMatrix) -> Result<usize> {
    let n = check_square(a)?;
    if n == 0 {
        return Err(Error::DimensionMismatch("empty operator".into()));
    }
    if n > MAX_DIM {
        return Err(Error::TooLarge(n));
    }
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(n)
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-&self.0)
    }
}

/// Checked matrix product.
pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.cols() != b.rows() {
        return Err(Error::DimensionMismatch(format!(
            "cannot multiply {}x{} by {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(a * b)
}

pub fn adjoint(a: &ComplexMatrix) -> ComplexMatrix {
    a.adjoint()
}

/// Singular values in descending order.
pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    if a.rows() == 0 || a.cols() == 0 {
        return Vec::new();
    }
    svd(a).1
}

const JACOBI_MAX_SWEEPS: usize = 80;

/// One-sided Jacobi on the columns of a tall matrix: returns `(W, V)` with
/// `a V = W`, `V` unitary and the columns of `W` mutually orthogonal.
fn jacobi_columns(a: &DMatrix<C64>) -> (DMatrix<C64>, DMatrix<C64>) {
    let n = a.ncols();
    let mut w = a.clone();
    let mut v = DMatrix::<C64>::identity(n, n);
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = w.column(p).norm_squared();
                let beta = w.column(q).norm_squared();
                let gamma = w.column(p).dotc(&w.column(q));
                let g = gamma.norm();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // rotate column q by the phase of γ, then a real rotation
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                for mat in [&mut w, &mut v] {
                    for r in 0..mat.nrows() {
                        let xp = mat[(r, p)];
                        let xq = mat[(r, q)] * phase.conj();
                        mat[(r, p)] = xp * cs - xq * sn;
                        mat[(r, q)] = xp * sn + xq * cs;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    (w, v)
}

/// Full SVD with singular values sorted descending: returns `(U, σ, V)` with
/// `a = U diag(σ) V†`; `U` is `rows x k`, `V` is `cols x k`, `k = min(rows, cols)`.
///
/// Computed by one-sided Jacobi, which keeps small singular values and their
/// vectors accurate to working precision relative to `‖a‖`.
pub fn svd(a: &ComplexMatrix) -> (ComplexMatrix, Vec<f64>, ComplexMatrix) {
    let (m, n) = (a.rows(), a.cols());
    if m < n {
        let (u, s, v) = svd(&a.adjoint());
        return (v, s, u);
    }
    let (w, v) = jacobi_columns(&a.0);
    let norms: Vec<f64> = (0..n).map(|j| w.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let sigma: Vec<f64> = order.iter().map(|&i| norms[i]).collect();
    let v = ComplexMatrix::from_fn(n, n, |r, k| v[(r, order[k])]);

    // left vectors: normalized columns, completed to an orthonormal set where
    // the singular value vanishes
    let top = sigma.first().copied().unwrap_or(0.0);
    let floor = top * f64::EPSILON * (m as f64);
    let mut u = DMatrix::<C64>::zeros(m, n);
    let mut filled = 0;
    for (k, &i) in order.iter().enumerate() {
        if sigma[k] > floor && sigma[k] > 0.0 {
            let col = w.column(i) / C64::new(sigma[k], 0.0);
            u.set_column(k, &col);
            filled = k + 1;
        }
    }
    for k in filled..n {
        // the standard basis vector with the largest residual against the
        // columns so far has residual norm at least sqrt((m - k) / m)
        let mut best: Option<(f64, nalgebra::DVector<C64>)> = None;
        for cand in 0..m {
            let mut e = nalgebra::DVector::<C64>::zeros(m);
            e[cand] = C64::new(1.0, 0.0);
            for _ in 0..2 {
                for j in 0..k {
                    let proj = u.column(j).dotc(&e);
                    e -= u.column(j) * proj;
                }
            }
            let nrm = e.norm();
            if best.as_ref().is_none_or(|(b, _)| nrm > *b) {
                best = Some((nrm, e));
            }
        }
        let (nrm, e) = best.expect("m >= n > k");
        u.set_column(k, &(e / C64::new(nrm, 0.0)));
    }
    (ComplexMatrix(u), sigma, v)
}

/// Ratio σ_min / σ_max (0 for the zero matrix).
pub fn inverse_condition(a: &ComplexMatrix) -> f64 {
    let s = singular_values(a);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if hi > 0.0 && s.len() == a.rows().min(a.cols()) => lo / hi,
        _ => 0.0,
    }
}

/// Number of singular values above `rel_tol * σ_max`.
pub fn numerical_rank(a: &ComplexMatrix, rel_tol: f64) -> usize {
    let s = singular_values(a);
    let hi = s.first().copied().unwrap_or(0.0);
    s.iter().filter(|&&x| x > rel_tol * hi && x > 0.0).count()
}

/// Number of singular values above an absolute threshold.
pub fn rank_above(a: &ComplexMatrix, threshold: f64) -> usize {
    singular_values(a).iter().filter(|&&x| x > threshold).count()
}

/// Orthonormal basis (as columns) of the right null space at an absolute
/// singular-value threshold.
pub fn null_space(a: &ComplexMatrix, threshold: f64) -> ComplexMatrix {
    let n = a.cols();
    // pad to a square problem so V is the full n x n unitary
    let padded = if a.rows() < n {
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..a.rows() {
            for j in 0..n {
                m.set(i, j, a.get(i, j));
            }
        }
        m
    } else {
        a.clone()
    };
    let (_, sigma, v) = svd(&padded);
    let rank = sigma.iter().filter(|&&x| x > threshold).count();
    v.select_columns(&(rank..n).collect::<Vec<_>>())
}

/// Orthonormal basis of the column space at a relative threshold.
pub fn orthonormal_basis(a: &ComplexMatrix, rel_tol: f64) -> ComplexMatrix {
    if a.cols() == 0 {
        return ComplexMatrix::zeros(a.rows(), 0);
    }
    let (u, sigma, _) = svd(a);
    let hi = sigma.first().copied().unwrap_or(0.0);
    let rank = sigma.iter().filter(|&&x| x > rel_tol * hi && x > 0.0).count();
    u.select_columns(&(0..rank).collect::<Vec<_>>())
}

/// Solves `a x = b` after certifying that `a` has full numerical rank.
pub fn solve(a: &ComplexMatrix, b: &ComplexMatrix, tol: &TolerancePolicy) -> Result<ComplexMatrix> {
    let n = check_square(a)?;
    if b.rows() != n {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side has {} rows, expected {n}",
            b.rows()
        )));
    }
    let ratio = inverse_condition(a);
    if ratio <= tol.rank_tol {
        return Err(Error::SingularMatrix { ratio });
    }
    let lu = a.0.clone().lu();
    let x = lu.solve(&b.0).ok_or(Error::SingularMatrix { ratio })?;
    Ok(ComplexMatrix(x))
}

pub fn inverse(a: &ComplexMatrix, tol: &TolerancePolicy) -> Result<ComplexMatrix> {
    solve(a, &ComplexMatrix::identity(check_square(a)?), tol)
}

/// Determinant via LU.
pub fn det(a: &ComplexMatrix) -> Result<C64> {
    check_square(a)?;
    Ok(a.0.clone().lu().determinant())
}

/// Upper-triangular Schur factor `T` with `a = Z T Z†`.
///
/// The factorization is validated by reconstruction; if the iteration stalls
/// or the result is inaccurate, it is retried on a fixed unitary rotation of
/// `a` (the spectrum is unchanged).
pub fn schur(a: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let n = check_square(a)?;
    let limit = SCHUR_ACCURACY * (n.max(1) as f64) * a.norm().max(f64::MIN_POSITIVE);
    let attempt = |m: &DMatrix<C64>| -> Option<(DMatrix<C64>, DMatrix<C64>)> {
        let (z, t) = nalgebra::Schur::try_new(m.clone(), f64::EPSILON, SCHUR_MAX_ITER)?.unpack();
        let rec = (&z * &t * z.adjoint() - m).norm();
        (rec <= limit).then_some((z, t))
    };
    if let Some((z, t)) = attempt(&a.0) {
        return Ok((ComplexMatrix(z), ComplexMatrix(t)));
    }
    // a nearly scalar matrix stalls the iteration; its trace-free part does not
    let mu = a.trace() / n as f64;
    let centred = &a.0 - DMatrix::<C64>::identity(n, n) * mu;
    if let Some((z, t)) = attempt(&centred) {
        let t = t + DMatrix::<C64>::identity(n, n) * mu;
        return Ok((ComplexMatrix(z), ComplexMatrix(t)));
    }
    for k in 1..=SCHUR_RETRIES {
        let q = rotation(n, k);
        let rotated = q.adjoint() * &a.0 * &q;
        if let Some((z, t)) = attempt(&rotated) {
            return Ok((ComplexMatrix(q * z), ComplexMatrix(t)));
        }
    }
    Err(Error::ConvergenceFailure)
}

const SCHUR_ACCURACY: f64 = 1e3 * f64::EPSILON;
const SCHUR_RETRIES: usize = 3;

/// Deterministic unitary built from a chirp, distinct for each `k`.
fn rotation(n: usize, k: usize) -> DMatrix<C64> {
    let m = DMatrix::from_fn(n, n, |i, j| {
        let phase = 0.7 * k as f64 * ((i * i + 3 * j + 1) as f64).sqrt() + 1.3 * (i * j) as f64;
        C64::from_polar(1.0 + ((i + 2 * j + k) % 5) as f64 * 0.1, phase)
    });
    jacobi_left(&m)
}

/// Orthonormal factor of a square nonsingular matrix (left singular vectors).
fn jacobi_left(m: &DMatrix<C64>) -> DMatrix<C64> {
    svd(&ComplexMatrix(m.clone())).0 .0
}

/// Plane rotation `[[c, s], [-conj(s), c]]` with `c` real that maps
/// `(f, g)` to `(r, 0)`.
fn givens(f: C64, g: C64) -> (f64, C64) {
    let (fa, ga) = (f.norm(), g.norm());
    if ga == 0.0 {
        (1.0, C64::default())
    } else if fa == 0.0 {
        (0.0, g.conj() / ga)
    } else {
        let d = fa.hypot(ga);
        (fa / d, (f / fa) * g.conj() / d)
    }
}

/// Orthonormal basis of the invariant subspace belonging to the selected
/// diagonal positions of a Schur form `a = Z T Z†`. The selected entries are
/// moved to the leading block by adjacent swaps, never exchanging two selected
/// entries with each other.
pub fn schur_invariant_subspace(z: &ComplexMatrix, t: &ComplexMatrix, selected: &[usize]) -> ComplexMatrix {
    let n = t.rows();
    let mut z = z.0.clone();
    let mut t = t.0.clone();
    let mut chosen = vec![false; n];
    for &i in selected {
        chosen[i] = true;
    }
    let mut target = 0;
    while target < selected.len() {
        let Some(mut p) = (target..n).find(|&i| chosen[i]) else { break };
        while p > target {
            let k = p - 1;
            let (a, b) = (t[(k, k)], t[(p, p)]);
            let (cs, sn) = givens(t[(k, p)], b - a);
            for j in 0..n {
                let (x, y) = (t[(k, j)], t[(p, j)]);
                t[(k, j)] = x * cs + y * sn;
                t[(p, j)] = y * cs - x * sn.conj();
            }
            for mat in [&mut t, &mut z] {
                for i in 0..mat.nrows() {
                    let (x, y) = (mat[(i, k)], mat[(i, p)]);
                    mat[(i, k)] = x * cs + y * sn.conj();
                    mat[(i, p)] = y * cs - x * sn;
                }
            }
            t[(p, k)] = C64::default();
            t[(k, k)] = b;
            t[(p, p)] = a;
            chosen.swap(k, p);
            p = k;
        }
        target += 1;
    }
    ComplexMatrix(z.columns(0, selected.len()).into_owned())
}

/// All eigenvalues (with algebraic multiplicity) from the Schur diagonal.
pub fn eigenvalues(a: &ComplexMatrix) -> Result<Vec<C64>> {
    let (_, t) = schur(a)?;
    Ok((0..t.rows()).map(|i| t.get(i, i)).collect())
}

/// An eigenvalue with its unit eigenvector, if one is still available.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: C64,
    /// `None` when the eigenvalue's geometric multiplicity is exhausted by
    /// earlier copies of the same eigenvalue.
    pub vector: Option<Vec<C64>>,
}

/// Eigenvalues with eigenvectors under the default tolerances.
pub fn eig(a: &ComplexMatrix) -> Result<Vec<EigenPair>> {
    eig_with(a, &TolerancePolicy::default())
}

/// Eigen-decomposition. Repeated eigenvalues (within `eig_cluster_tol`) share
/// the null space of `a - λI`; each copy takes the next basis vector until the
/// null space runs out.
pub fn eig_with(a: &ComplexMatrix, tol: &TolerancePolicy) -> Result<Vec<EigenPair>> {
    let n = check_square(a)?;
    let values = eigenvalues(a)?;
    let scale = a.norm();
    let mut out: Vec<EigenPair> = Vec::with_capacity(n);
    let mut used: Vec<(C64, ComplexMatrix, usize)> = Vec::new();
    for &value in &values {
        let slot = used
            .iter()
            .position(|(mu, _, _)| (mu - value).norm() <= tol.eig_cluster_tol * scale);
        let idx = match slot {
            Some(k) => k,
            None => {
                let shifted = a - &ComplexMatrix::identity(n).scale(value);
                let (_, sigma, v) = svd(&shifted);
                let thr = (tol.rank_tol * scale).max(f64::MIN_POSITIVE);
                let nullity = sigma.iter().filter(|&&s| s <= thr).count().max(1);
                let basis = v.select_columns(&((n - nullity)..n).collect::<Vec<_>>());
                used.push((value, basis, 0));
                used.len() - 1
            }
        };
        let (_, basis, taken) = &mut used[idx];
        let vector = if *taken < basis.cols() {
            let v = basis.column(basis.cols() - 1 - *taken);
            *taken += 1;
            Some(v)
        } else {
            None
        };
        out.push(EigenPair { value, vector });
    }
    Ok(out)
}

/// Eigenvalues of a Hermitian matrix, ascending.
///
/// Uses the real symmetric embedding `[[X, -Y], [Y, X]]` of `X + iY`, whose
/// spectrum is that of `a` with every eigenvalue doubled.
pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> Result<Vec<f64>> {
    let n = check_square(a)?;
    let h = a.hermitian_part();
    let real = DMatrix::<f64>::from_fn(2 * n, 2 * n, |i, j| {
        let z = h.get(i % n, j % n);
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let mut ev: Vec<f64> = real.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev.into_iter().step_by(2).collect())
}

/// `‖a - b‖_F`.
pub fn distance(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (a - b).norm()
}
