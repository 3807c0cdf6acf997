//! Dense small-matrix kernel over ℝ and ℂ.
//!
//! Every matrix stores complex entries; [`Field::Real`] is a constraint tag
//! meaning all imaginary parts are exactly zero. Dimensions are expected to
//! stay at or below 64.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::linalg::Schur;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Field {
    #[serde(rename = "R")]
    Real,
    #[serde(rename = "C")]
    Complex,
}

impl Field {
    /// The smallest field containing both.
    pub fn join(self, other: Field) -> Field {
        if self == Field::Complex || other == Field::Complex {
            Field::Complex
        } else {
            Field::Real
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Field::Real => "R",
            Field::Complex => "C",
        }
    }
}

impl std::str::FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "R" | "r" | "real" => Ok(Field::Real),
            "C" | "c" | "complex" => Ok(Field::Complex),
            other => Err(Error::InvalidInput(format!("unknown field `{other}` (use R or C)"))),
        }
    }
}

/// Comparison thresholds shared by the whole crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Entrywise comparison.
    pub eq_tol: f64,
    /// Singular-value / pivot threshold, relative to the largest one.
    pub rank_tol: f64,
    /// Eigenvalue clustering radius.
    pub cluster_tol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            eq_tol: 1e-9,
            rank_tol: 1e-8,
            cluster_tol: 1e-6,
        }
    }
}

impl Tolerance {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("eq_tol", self.eq_tol),
            ("rank_tol", self.rank_tol),
            ("cluster_tol", self.cluster_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidInput(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Dense square matrix, row-major.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct Matrix {
    field: Field,
    n: usize,
    data: Vec<C64>,
}

/// Wire format: `{"field":"R"|"C","n":<int>,"entries":[[[re,im],…],…]}`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixRepr {
    field: Field,
    n: usize,
    entries: Vec<Vec<[f64; 2]>>,
}

impl TryFrom<MatrixRepr> for Matrix {
    type Error = Error;

    fn try_from(r: MatrixRepr) -> Result<Self> {
        if r.n == 0 {
            return Err(Error::InvalidInput("n must be positive".into()));
        }
        if r.entries.len() != r.n {
            return Err(Error::InvalidInput(format!(
                "entries has {} rows, expected {}",
                r.entries.len(),
                r.n
            )));
        }
        let mut data = Vec::with_capacity(r.n * r.n);
        for (i, row) in r.entries.iter().enumerate() {
            if row.len() != r.n {
                return Err(Error::InvalidInput(format!(
                    "row {i} has {} entries, expected {}",
                    row.len(),
                    r.n
                )));
            }
            for (j, &[re, im]) in row.iter().enumerate() {
                if !re.is_finite() || !im.is_finite() {
                    return Err(Error::InvalidInput(format!("entry ({i},{j}) is not finite")));
                }
                if r.field == Field::Real && im != 0.0 {
                    return Err(Error::InvalidInput(format!(
                        "entry ({i},{j}) has nonzero imaginary part in a real matrix"
                    )));
                }
                data.push(C64::new(re, im));
            }
        }
        Ok(Matrix {
            field: r.field,
            n: r.n,
            data,
        })
    }
}

impl From<Matrix> for MatrixRepr {
    fn from(m: Matrix) -> Self {
        let entries = (0..m.n)
            .map(|i| (0..m.n).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
            .collect();
        MatrixRepr {
            field: m.field,
            n: m.n,
            entries,
        }
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix<{}>({}x{})", self.field.symbol(), self.n, self.n)?;
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n)
                .map(|j| {
                    let z = self[(i, j)];
                    if self.field == Field::Real {
                        format!("{:>10.4}", z.re)
                    } else {
                        format!("{:>9.4}{:+.4}i", z.re, z.im)
                    }
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n + j]
    }
}

impl Matrix {
    pub fn zeros(field: Field, n: usize) -> Matrix {
        Matrix {
            field,
            n,
            data: vec![ZERO; n * n],
        }
    }

    pub fn identity(field: Field, n: usize) -> Matrix {
        let mut m = Matrix::zeros(field, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major complex data, tagging it `Real` only if
    /// requested and every imaginary part is exactly zero.
    pub fn from_vec(field: Field, n: usize, data: Vec<C64>) -> Result<Matrix> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("matrix entries must be finite".into()));
        }
        if field == Field::Real && data.iter().any(|z| z.im != 0.0) {
            return Err(Error::InvalidInput(
                "real matrix has nonzero imaginary part".into(),
            ));
        }
        Ok(Matrix { field, n, data })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Matrix {
        let n = rows.len();
        let mut m = Matrix::zeros(Field::Real, n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "row {i} has wrong length");
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = C64::new(v, 0.0);
            }
        }
        m
    }

    pub fn from_complex_rows(rows: &[Vec<C64>]) -> Matrix {
        let n = rows.len();
        let mut m = Matrix::zeros(Field::Complex, n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "row {i} has wrong length");
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn diag(field: Field, values: &[C64]) -> Matrix {
        let mut m = Matrix::zeros(field, values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        if field == Field::Real {
            m.data.iter_mut().for_each(|z| z.im = 0.0);
        }
        m
    }

    pub fn real_diag(values: &[f64]) -> Matrix {
        let vals: Vec<C64> = values.iter().map(|&v| C64::new(v, 0.0)).collect();
        Matrix::diag(Field::Real, &vals)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    /// Reinterprets the same entries over ℂ.
    pub fn complexified(&self) -> Matrix {
        Matrix {
            field: Field::Complex,
            ..self.clone()
        }
    }

    pub fn max_imag(&self) -> f64 {
        self.data.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    /// Drops imaginary parts if none exceeds `tol`; errors otherwise.
    pub fn realified(&self, tol: f64) -> Result<Matrix> {
        let residue = self.max_imag();
        if residue > tol {
            return Err(Error::NumericalFailure(format!(
                "imaginary residue {residue:.3e} exceeds {tol:.1e}"
            )));
        }
        Ok(Matrix {
            field: Field::Real,
            n: self.n,
            data: self.data.iter().map(|z| C64::new(z.re, 0.0)).collect(),
        })
    }

    /// Max-abs entry norm, ‖·‖_max.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Induced 1-norm (max column sum).
    pub fn norm_one(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn scale(&self, s: C64) -> Matrix {
        let field = if s.im == 0.0 { self.field } else { Field::Complex };
        Matrix {
            field,
            n: self.n,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Matrix {
        self.scale(C64::new(s, 0.0))
    }

    pub fn conj(&self) -> Matrix {
        Matrix {
            field: self.field,
            n: self.n,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.n, "matvec dimension mismatch");
        (0..self.n)
            .map(|i| {
                let row = &self.data[i * self.n..(i + 1) * self.n];
                row.iter().zip(x).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    /// Writes `self · x` into `out` without allocating.
    pub fn matvec_into(&self, x: &[C64], out: &mut [C64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.data[i * self.n..(i + 1) * self.n];
            *o = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    pub fn powi(&self, k: u32) -> Matrix {
        let mut result = Matrix::identity(self.field, self.n);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        result
    }

    /// `self·other − other·self`.
    pub fn commutator(&self, other: &Matrix) -> Matrix {
        &(self * other) - &(other * self)
    }

    /// ‖self − other‖_max.
    pub fn dist_max(&self, other: &Matrix) -> f64 {
        assert_eq!(self.n, other.n);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Matrix, tol: f64) -> bool {
        self.n == other.n && self.dist_max(other) <= tol
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.n, self.n, &self.data)
    }

    fn binary(&self, other: &Matrix, f: impl Fn(C64, C64) -> C64) -> Matrix {
        assert_eq!(self.n, other.n, "dimension mismatch");
        Matrix {
            field: self.field.join(other.field),
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        self.binary(rhs, |a, b| a + b)
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        self.binary(rhs, |a, b| a - b)
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        self.scale_real(-1.0)
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let n = self.n;
        let mut data = vec![ZERO; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[k * n..(k + 1) * n];
                let out = &mut data[i * n..(i + 1) * n];
                for (o, b) in out.iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        Matrix {
            field: self.field.join(rhs.field),
            n,
            data,
        }
    }
}

/// Checked product: dimensions and field tags must agree.
pub fn mat_mul(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch {
            expected: a.n,
            found: b.n,
        });
    }
    if a.field != b.field {
        return Err(Error::FieldMismatch(a.field, b.field));
    }
    Ok(a * b)
}

/// Inverse by Gauss–Jordan elimination with partial pivoting.
///
/// A pivot smaller than `rank_tol · ‖a‖_max` is reported as singular.
pub fn mat_inverse(a: &Matrix, tol: &Tolerance) -> Result<Matrix> {
    let n = a.n;
    let scale = a.max_abs();
    if scale == 0.0 {
        return Err(Error::SingularMatrix { pivot: 0.0 });
    }
    let threshold = tol.rank_tol * scale;
    let mut work = a.data.clone();
    let mut inv = Matrix::identity(a.field, n).data;
    for col in 0..n {
        let (pivot_row, pivot_abs) = (col..n)
            .map(|r| (r, work[r * n + col].norm()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot_abs < threshold {
            return Err(Error::SingularMatrix { pivot: pivot_abs });
        }
        if pivot_row != col {
            for j in 0..n {
                work.swap(col * n + j, pivot_row * n + j);
                inv.swap(col * n + j, pivot_row * n + j);
            }
        }
        let p = work[col * n + col];
        for j in 0..n {
            work[col * n + j] /= p;
            inv[col * n + j] /= p;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = work[r * n + col];
            if f == ZERO {
                continue;
            }
            for j in 0..n {
                let wv = work[col * n + j];
                let iv = inv[col * n + j];
                work[r * n + j] -= f * wv;
                inv[r * n + j] -= f * iv;
            }
        }
    }
    Ok(Matrix {
        field: a.field,
        n,
        data: inv,
    })
}

/// All eigenvalues with algebraic multiplicity, in no particular order.
///
/// Hessenberg reduction followed by shifted QR iteration (complex Schur form),
/// capped at `100·n` iterations.
pub fn eigenvalues(a: &Matrix) -> Result<Vec<C64>> {
    if a.n > 64 {
        return Err(Error::InvalidInput(format!(
            "dimension {} exceeds the supported maximum of 64",
            a.n
        )));
    }
    if !a.is_finite() {
        return Err(Error::NumericalFailure("non-finite matrix entries".into()));
    }
    let schur = Schur::try_new(a.to_nalgebra(), f64::EPSILON, 100 * a.n.max(1)).ok_or_else(
        || Error::NumericalFailure("QR iteration did not converge".into()),
    )?;
    let (_, t) = schur.unpack();
    Ok(t.diagonal().iter().copied().collect())
}

/// Singular values (descending) of a rectangular complex matrix given by rows.
pub fn singular_values(rows: &[Vec<C64>]) -> Vec<f64> {
    let Some(cols) = rows.first().map(Vec::len) else {
        return Vec::new();
    };
    if cols == 0 {
        return Vec::new();
    }
    let flat: Vec<C64> = rows.iter().flatten().copied().collect();
    let m = DMatrix::from_row_slice(rows.len(), cols, &flat);
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Numerical rank: number of singular values above `rank_tol · σ_max`.
pub fn numerical_rank(rows: &[Vec<C64>], tol: &Tolerance) -> usize {
    let sv = singular_values(rows);
    let Some(&smax) = sv.first() else { return 0 };
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol.rank_tol * smax).count()
}

pub fn numerical_rank_real(rows: &[Vec<f64>], tol: &Tolerance) -> usize {
    let rows: Vec<Vec<C64>> = rows
        .iter()
        .map(|r| r.iter().map(|&v| C64::new(v, 0.0)).collect())
        .collect();
    numerical_rank(&rows, tol)
}

pub fn matrix_rank(a: &Matrix, tol: &Tolerance) -> usize {
    let rows: Vec<Vec<C64>> = (0..a.n)
        .map(|i| a.data[i * a.n..(i + 1) * a.n].to_vec())
        .collect();
    numerical_rank(&rows, tol)
}

/// Orthonormal basis of the numerical nullspace of the stacked `rows`.
///
/// If every row is real the returned vectors are real.
pub fn nullspace_basis(rows: &[Vec<C64>], cols: usize, tol: &Tolerance) -> Result<Vec<Vec<C64>>> {
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != cols) {
        return Err(Error::InvalidInput(format!(
            "row {i} has length {}, expected {cols}",
            r.len()
        )));
    }
    if cols == 0 {
        return Ok(Vec::new());
    }
    // Pad with zero rows so the SVD yields a full right basis.
    let m = rows.len().max(cols);
    let all_real = rows.iter().flatten().all(|z| z.im == 0.0);
    if all_real {
        let mut a = DMatrix::<f64>::zeros(m, cols);
        for (i, r) in rows.iter().enumerate() {
            for (j, z) in r.iter().enumerate() {
                a[(i, j)] = z.re;
            }
        }
        let svd = a.svd(false, true);
        let v_t = svd
            .v_t
            .ok_or_else(|| Error::NumericalFailure("SVD failed".into()))?;
        let sv = &svd.singular_values;
        let smax = sv.iter().copied().fold(0.0, f64::max);
        Ok((0..sv.len())
            .filter(|&k| smax == 0.0 || sv[k] <= tol.rank_tol * smax)
            .map(|k| (0..cols).map(|j| C64::new(v_t[(k, j)], 0.0)).collect())
            .collect())
    } else {
        let mut a = DMatrix::<C64>::zeros(m, cols);
        for (i, r) in rows.iter().enumerate() {
            for (j, z) in r.iter().enumerate() {
                a[(i, j)] = *z;
            }
        }
        let svd = a.svd(false, true);
        let v_t = svd
            .v_t
            .ok_or_else(|| Error::NumericalFailure("SVD failed".into()))?;
        let sv = &svd.singular_values;
        let smax = sv.iter().copied().fold(0.0, f64::max);
        Ok((0..sv.len())
            .filter(|&k| smax == 0.0 || sv[k] <= tol.rank_tol * smax)
            .map(|k| (0..cols).map(|j| v_t[(k, j)].conj()).collect())
            .collect())
    }
}

/// Rank of the Krylov family `{x, ax, …, a^{n−1}x}`.
pub fn krylov_rank(a: &Matrix, x: &[C64], tol: &Tolerance) -> Result<usize> {
    if x.len() != a.n {
        return Err(Error::DimensionMismatch {
            expected: a.n,
            found: x.len(),
        });
    }
    let mut cols = Vec::with_capacity(a.n);
    let mut v = x.to_vec();
    for _ in 0..a.n {
        let next = a.matvec(&v);
        cols.push(std::mem::replace(&mut v, next));
    }
    Ok(numerical_rank(&cols, tol))
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Entries uniform in [−1,1]; complex entries get independent real and
/// imaginary parts.
pub fn random_vector<R: Rng + ?Sized>(field: Field, n: usize, rng: &mut R) -> Vec<C64> {
    (0..n)
        .map(|_| random_scalar(field, rng))
        .collect()
}

pub fn random_scalar<R: Rng + ?Sized>(field: Field, rng: &mut R) -> C64 {
    let re = rng.gen_range(-1.0..=1.0);
    let im = match field {
        Field::Real => 0.0,
        Field::Complex => rng.gen_range(-1.0..=1.0),
    };
    C64::new(re, im)
}

pub fn random_matrix<R: Rng + ?Sized>(field: Field, n: usize, rng: &mut R) -> Matrix {
    Matrix {
        field,
        n,
        data: random_vector(field, n * n, rng),
    }
}

/// Incrementally built basis of a subspace of ℂᴺ, used for linear
/// independence tests and coordinate solves against the original (not
/// orthonormalized) spanning vectors.
#[derive(Debug, Clone, Default)]
pub struct IncrementalBasis {
    ortho: Vec<Vec<C64>>,
    /// Upper-triangular `r` with `original[j] = Σ_i r[i][j] · ortho[i]`,
    /// stored by column.
    r_cols: Vec<Vec<C64>>,
}

impl IncrementalBasis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.ortho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ortho.is_empty()
    }

    fn project(&self, v: &[C64]) -> (Vec<C64>, Vec<C64>) {
        let mut resid = v.to_vec();
        let mut coeffs = vec![ZERO; self.ortho.len()];
        // Two passes of modified Gram–Schmidt.
        for _ in 0..2 {
            for (k, q) in self.ortho.iter().enumerate() {
                let c: C64 = q.iter().zip(&resid).map(|(a, b)| a.conj() * b).sum();
                coeffs[k] += c;
                for (r, qq) in resid.iter_mut().zip(q) {
                    *r -= c * qq;
                }
            }
        }
        (coeffs, resid)
    }

    /// Appends `v` if its component orthogonal to the current span exceeds
    /// `rank_tol · ‖v‖`. Returns whether it was appended.
    pub fn try_push(&mut self, v: &[C64], rank_tol: f64) -> bool {
        let norm = vec_norm(v);
        if norm == 0.0 || !norm.is_finite() {
            return false;
        }
        let (mut coeffs, resid) = self.project(v);
        let rn = vec_norm(&resid);
        if rn <= rank_tol * norm {
            return false;
        }
        self.ortho.push(resid.iter().map(|z| z / rn).collect());
        coeffs.push(C64::new(rn, 0.0));
        self.r_cols.push(coeffs);
        true
    }

    /// Orthonormal vectors spanning the same space, in push order.
    pub fn orthonormal(&self) -> &[Vec<C64>] {
        &self.ortho
    }

    /// Components of `v` along [`Self::orthonormal`].
    pub fn ortho_coordinates(&self, v: &[C64]) -> Vec<C64> {
        self.project(v).0
    }

    /// Coordinates of `v` against the pushed vectors and the relative
    /// residual `‖v − Σ cᵢ vᵢ‖ / max(‖v‖, tiny)`.
    pub fn coordinates(&self, v: &[C64]) -> (Vec<C64>, f64) {
        let (c, resid) = self.project(v);
        let d = self.ortho.len();
        let mut x = vec![ZERO; d];
        for i in (0..d).rev() {
            let mut s = c[i];
            for j in (i + 1)..d {
                s -= self.r_cols[j][i] * x[j];
            }
            x[i] = s / self.r_cols[i][i];
        }
        let norm = vec_norm(v);
        let rel = if norm > 0.0 { vec_norm(&resid) / norm } else { 0.0 };
        (x, rel)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn sorted(mut v: Vec<C64>) -> Vec<C64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn products() {
        let a = Matrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let i2 = Matrix::identity(Field::Real, 2);
        assert_eq!(mat_mul(&i2, &a).unwrap(), a);
        let d = mat_mul(&Matrix::real_diag(&[2.0, 3.0]), &Matrix::real_diag(&[5.0, 7.0])).unwrap();
        assert_eq!(d, Matrix::real_diag(&[10.0, 21.0]));
        let nil = Matrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert_eq!(mat_mul(&nil, &nil).unwrap(), Matrix::zeros(Field::Real, 2));
    }

    #[test]
    fn mat_mul_rejects_mismatch() {
        let a = Matrix::identity(Field::Real, 2);
        let b = Matrix::identity(Field::Real, 3);
        assert!(matches!(mat_mul(&a, &b), Err(Error::DimensionMismatch { .. })));
        let c = Matrix::identity(Field::Complex, 2);
        assert!(matches!(mat_mul(&a, &c), Err(Error::FieldMismatch(..))));
    }

    #[test]
    fn inverse_cases() {
        let tol = Tolerance::default();
        let i3 = Matrix::identity(Field::Real, 3);
        assert_eq!(mat_inverse(&i3, &tol).unwrap(), i3);
        let inv = mat_inverse(&Matrix::real_diag(&[2.0, 4.0]), &tol).unwrap();
        assert!(inv.approx_eq(&Matrix::real_diag(&[0.5, 0.25]), 1e-15));
        assert!(matches!(
            mat_inverse(&Matrix::zeros(Field::Real, 2), &tol),
            Err(Error::SingularMatrix { .. })
        ));
    }

    #[test]
    fn eigenvalue_cases() {
        let ev = sorted(eigenvalues(&Matrix::real_diag(&[1.0, 2.0, 3.0])).unwrap());
        for (e, want) in ev.iter().zip([1.0, 2.0, 3.0]) {
            assert!((e - c(want)).norm() < 1e-12);
        }
        let jordan = Matrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
        for e in eigenvalues(&jordan).unwrap() {
            assert!((e - ONE).norm() < 1e-6);
        }
        let rot = Matrix::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]);
        let ev = sorted(eigenvalues(&rot).unwrap());
        assert!((ev[0] - C64::new(0.0, -1.0)).norm() < 1e-12);
        assert!((ev[1] - C64::new(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn nullspace_cases() {
        let tol = Tolerance::default();
        let i2 = vec![vec![ONE, ZERO], vec![ZERO, ONE]];
        assert!(nullspace_basis(&i2, 2, &tol).unwrap().is_empty());
        let zero_row = vec![vec![ZERO; 3]];
        assert_eq!(nullspace_basis(&zero_row, 3, &tol).unwrap().len(), 3);
        let ones = vec![vec![ONE, ONE]];
        let ns = nullspace_basis(&ones, 2, &tol).unwrap();
        assert_eq!(ns.len(), 1);
        let v = &ns[0];
        assert!((v[0] + v[1]).norm() < 1e-12);
        assert!((vec_norm(v) - 1.0).abs() < 1e-12);
        assert!(nullspace_basis(&[vec![ONE]], 2, &tol).is_err());
    }

    #[test]
    fn krylov_cases() {
        let tol = Tolerance::default();
        let x = vec![c(0.3), c(-0.7)];
        assert_eq!(krylov_rank(&Matrix::identity(Field::Real, 2), &x, &tol).unwrap(), 1);
        let jordan = Matrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
        assert_eq!(krylov_rank(&jordan, &[ZERO, ONE], &tol).unwrap(), 2);
        // diag(1,1,2) has minimal polynomial (t−1)(t−2) of degree 2.
        let d = Matrix::real_diag(&[1.0, 1.0, 2.0]);
        let generic = vec![c(0.4), c(-0.9), c(0.6)];
        assert_eq!(krylov_rank(&d, &generic, &tol).unwrap(), 2);
    }

    #[test]
    fn json_roundtrip_and_schema() {
        let m = Matrix::from_complex_rows(&[
            vec![C64::new(1.0, 2.0), ZERO],
            vec![C64::new(-0.5, 0.0), C64::new(0.0, 3.0)],
        ]);
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(serde_json::from_str::<Matrix>(&s).unwrap(), m);
        let bad = r#"{"field":"R","n":1,"entries":[[[1.0,0.5]]]}"#;
        assert!(serde_json::from_str::<Matrix>(bad).is_err());
        let ragged = r#"{"field":"C","n":2,"entries":[[[1,0],[0,0]],[[0,0]]]}"#;
        assert!(serde_json::from_str::<Matrix>(ragged).is_err());
    }

    #[test]
    fn incremental_basis_coordinates() {
        let mut b = IncrementalBasis::new();
        assert!(b.try_push(&[ONE, ONE, ZERO], 1e-10));
        assert!(b.try_push(&[ONE, ZERO, ONE], 1e-10));
        assert!(!b.try_push(&[c(2.0), ONE, ONE], 1e-10));
        let (x, resid) = b.coordinates(&[c(3.0), c(1.0), c(2.0)]);
        assert!(resid < 1e-14);
        assert!((x[0] - ONE).norm() < 1e-12 && (x[1] - c(2.0)).norm() < 1e-12);
    }

    #[test]
    fn random_inverse_residual() {
        let tol = Tolerance::default();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=6 {
            for field in [Field::Real, Field::Complex] {
                let a = loop {
                    let a = random_matrix(field, n, &mut rng);
                    if mat_inverse(&a, &tol).is_ok() {
                        break a;
                    }
                };
                let inv = mat_inverse(&a, &tol).unwrap();
                let resid = (&a * &inv).dist_max(&Matrix::identity(field, n));
                assert!(resid <= 1e-7, "n={n} residual {resid}");
            }
        }
    }
}
