//! Dense complex linear algebra and the vectorization calculus.
//!
//! Matrices are stored row-major. Composite systems use the convention that
//! the first subsystem is the most significant digit of a basis index, so
//! `|i>|j>` on a `d x d` register has index `i * d + j`. The same ordering
//! is used by [`vec`], which makes `(A ⊗ B) |C> = |A C Bᵀ>` hold exactly as
//! written.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Absolute tolerance for structural predicates on matrices.
pub const PREDICATE_TOL: f64 = 1e-10;

/// Probability below which a projection outcome is treated as impossible.
pub const ZERO_PROBABILITY: f64 = 1e-24;

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// `e^{iθ}`.
#[inline]
pub fn phase(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

/// Dense complex matrix with explicit dimensions.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::new(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(d: usize) -> Self {
        let mut m = Self::zeros(d, d);
        for i in 0..d {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let d = diag.len();
        let mut m = Self::zeros(d, d);
        for (i, &x) in diag.iter().enumerate() {
            m[(i, i)] = x;
        }
        m
    }

    /// `|a><b|`.
    pub fn outer(a: &ComplexVector, b: &ComplexVector) -> Self {
        let mut m = Self::zeros(a.dim(), b.dim());
        for (i, &x) in a.entries().iter().enumerate() {
            for (j, &y) in b.entries().iter().enumerate() {
                m[(i, j)] = x * y.conj();
            }
        }
        m
    }

    /// Pure-state projector `|ψ><ψ|`.
    pub fn projector(psi: &ComplexVector) -> Self {
        Self::outer(psi, psi)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn dim(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)];
            }
        }
        m
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        self.transpose().conj()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest absolute entry of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &ComplexVector) -> Result<ComplexVector> {
        if self.cols != v.dim() {
            return Err(Error::DimensionMismatch(format!(
                "cannot apply {}x{} matrix to a vector of dim {}",
                self.rows,
                self.cols,
                v.dim()
            )));
        }
        let data = (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v.entries())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect();
        Ok(ComplexVector { data })
    }

    /// Integer power of a square matrix.
    pub fn pow(&self, n: usize) -> Result<Self> {
        let d = self.dim()?;
        let mut out = Self::identity(d);
        for _ in 0..n {
            out = out.matmul(self)?;
        }
        Ok(out)
    }

    pub fn is_unitary(&self) -> bool {
        let Ok(d) = self.dim() else { return false };
        self.adjoint()
            .matmul(self)
            .and_then(|p| p.max_abs_diff(&Self::identity(d)))
            .map(|r| r < PREDICATE_TOL)
            .unwrap_or(false)
    }

    pub fn is_hermitian(&self) -> bool {
        self.is_square()
            && self
                .max_abs_diff(&self.adjoint())
                .map(|r| r < PREDICATE_TOL)
                .unwrap_or(false)
    }

    pub fn is_diagonal(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| i == j || self[(i, j)].norm() < PREDICATE_TOL)
            })
    }

    /// Nonzero entries only on the anti-diagonal `i + j = d - 1`.
    pub fn is_antidiagonal(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols)
                    .all(|j| i + j == self.rows - 1 || self[(i, j)].norm() < PREDICATE_TOL)
            })
    }

    /// `(M + M†) / 2`.
    pub fn hermitian_part(&self) -> Result<Self> {
        self.dim()?;
        Ok((self + &self.adjoint()).scale(C64::new(0.5, 0.0)))
    }

    /// Eigenvalues of a Hermitian matrix, ascending.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        let herm = self.hermitian_part()?;
        let mut ev: Vec<f64> = herm.to_nalgebra().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        Ok(ev)
    }

    /// Singular values, descending.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut sv: Vec<f64> = self.to_nalgebra().singular_values().iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        sv
    }

    /// Checks Hermiticity, unit trace and positive semidefiniteness.
    pub fn validate_density_matrix(&self) -> Result<()> {
        let d = self.dim()?;
        let herm = self.max_abs_diff(&self.adjoint())?;
        if herm > PREDICATE_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (deviation {herm:.3e})"
            )));
        }
        let tr = self.trace();
        if (tr - ONE).norm() > PREDICATE_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "trace is {tr}, expected 1 (dim {d})"
            )));
        }
        let min_ev = self.hermitian_eigenvalues()?[0];
        if min_ev < -PREDICATE_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {min_ev:.3e}"
            )));
        }
        Ok(())
    }

    /// `Tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        self.matmul(self).map(|m| m.trace().re).unwrap_or(f64::NAN)
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub(crate) fn from_nalgebra(m: &DMatrix<C64>) -> Self {
        let (rows, cols) = m.shape();
        let mut out = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                out[(i, j)] = m[(i, j)];
            }
        }
        out
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.check_same_shape(rhs).expect("matrix addition");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.check_same_shape(rhs).expect("matrix subtraction");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    /// Panics on a shape mismatch; use [`ComplexMatrix::matmul`] for a fallible product.
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix product")
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Dense complex vector (a ket).
#[derive(Clone, PartialEq)]
pub struct ComplexVector {
    data: Vec<C64>,
}

impl ComplexVector {
    pub fn new(data: Vec<C64>) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::DimensionMismatch("vector dimension must be positive".into()));
        }
        Ok(Self { data })
    }

    pub fn from_real(data: &[f64]) -> Result<Self> {
        Self::new(data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "vector dimension must be positive");
        Self {
            data: vec![ZERO; dim],
        }
    }

    /// Computational basis vector `|index>`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.data[index] = ONE;
        v
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::ZeroNorm);
        }
        Ok(self.scale(C64::new(1.0 / n, 0.0)))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "inner product of dims {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Tensor product `|self>|other>`.
    pub fn kron(&self, other: &Self) -> Self {
        let mut data = Vec::with_capacity(self.dim() * other.dim());
        for &a in &self.data {
            data.extend(other.data.iter().map(|&b| a * b));
        }
        Self { data }
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "dims {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

impl Index<usize> for ComplexVector {
    type Output = C64;

    fn index(&self, i: usize) -> &C64 {
        &self.data[i]
    }
}

impl fmt::Debug for ComplexVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexVector[")?;
        for (i, z) in self.data.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:+.6}{:+.6}i", z.re, z.im)?;
        }
        write!(f, "]")
    }
}

/// Kronecker (tensor) product.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let x = a[(i, j)];
            for k in 0..b.rows {
                for l in 0..b.cols {
                    out[(i * b.rows + k, j * b.cols + l)] = x * b[(k, l)];
                }
            }
        }
    }
    out
}

/// `|C> = Σ C_ij |i>|j>`, unnormalized, row-major.
pub fn vec(c: &ComplexMatrix) -> Result<ComplexVector> {
    c.dim()?;
    Ok(ComplexVector {
        data: c.data.clone(),
    })
}

/// Inverse of [`vec`] for a `d x d` operator.
pub fn unvec(v: &ComplexVector, d: usize) -> Result<ComplexMatrix> {
    if d == 0 || v.dim() != d * d {
        return Err(Error::DimensionMismatch(format!(
            "vector of dim {} is not the vectorization of a {d}x{d} operator",
            v.dim()
        )));
    }
    ComplexMatrix::new(d, d, v.data.clone())
}

/// Max-abs residual of `(A ⊗ B)|C> - |A C Bᵀ>`.
pub fn vec_identity_residual(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    c: &ComplexMatrix,
) -> Result<f64> {
    let d = a.dim()?;
    if b.dim()? != d || c.dim()? != d {
        return Err(Error::DimensionMismatch(format!(
            "operators of dims {d}, {}, {}",
            b.rows, c.rows
        )));
    }
    let lhs = kron(a, b).apply(&vec(c)?)?;
    let rhs = vec(&a.matmul(c)?.matmul(&b.transpose())?)?;
    lhs.max_abs_diff(&rhs)
}

/// Digit layout of a composite register.
#[derive(Debug, Clone)]
pub(crate) struct Layout {
    dims: Vec<usize>,
    strides: Vec<usize>,
    total: usize,
}

impl Layout {
    pub(crate) fn new(dims: &[usize]) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::DimensionMismatch(format!(
                "subsystem dimensions must be nonempty and positive, got {dims:?}"
            )));
        }
        let mut strides = vec![1; dims.len()];
        for k in (0..dims.len() - 1).rev() {
            strides[k] = strides[k + 1] * dims[k + 1];
        }
        Ok(Self {
            dims: dims.to_vec(),
            strides,
            total: dims.iter().product(),
        })
    }

    pub(crate) fn total(&self) -> usize {
        self.total
    }

    pub(crate) fn check_subsystem(&self, k: usize) -> Result<usize> {
        self.dims.get(k).copied().ok_or_else(|| {
            Error::DimensionMismatch(format!(
                "subsystem {k} out of range for {} subsystems",
                self.dims.len()
            ))
        })
    }

    pub(crate) fn digit(&self, index: usize, k: usize) -> usize {
        (index / self.strides[k]) % self.dims[k]
    }

    pub(crate) fn with_digit(&self, index: usize, k: usize, value: usize) -> usize {
        index - self.digit(index, k) * self.strides[k] + value * self.strides[k]
    }

    /// Index on the register with subsystem `k` removed.
    pub(crate) fn drop_digit(&self, index: usize, k: usize) -> usize {
        let block = self.strides[k] * self.dims[k];
        (index / block) * self.strides[k] + index % self.strides[k]
    }
}

/// Applies `op` to subsystem `k` of a pure state, leaving the rest untouched.
pub fn apply_local(
    state: &ComplexVector,
    dims: &[usize],
    k: usize,
    op: &ComplexMatrix,
) -> Result<ComplexVector> {
    let layout = Layout::new(dims)?;
    let dk = layout.check_subsystem(k)?;
    if layout.total() != state.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state dim {} does not match subsystem dims {dims:?}",
            state.dim()
        )));
    }
    if op.rows != dk || op.cols != dk {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} operator on subsystem of dim {dk}",
            op.rows, op.cols
        )));
    }
    let mut out = vec![ZERO; state.dim()];
    for (idx, slot) in out.iter_mut().enumerate() {
        let row = layout.digit(idx, k);
        *slot = (0..dk)
            .map(|col| op[(row, col)] * state.data[layout.with_digit(idx, k, col)])
            .sum();
    }
    Ok(ComplexVector { data: out })
}

/// Applies `ops[0] ⊗ ops[1] ⊗ ...` factor by factor.
pub fn apply_product(state: &ComplexVector, ops: &[ComplexMatrix]) -> Result<ComplexVector> {
    let dims = ops.iter().map(|op| op.dim()).collect::<Result<Vec<_>>>()?;
    ops.iter()
        .enumerate()
        .try_fold(state.clone(), |acc, (k, op)| apply_local(&acc, &dims, k, op))
}

/// Result of projecting one subsystem of a pure state.
#[derive(Debug, Clone)]
pub struct Projection {
    pub probability: f64,
    /// Renormalized state of the remaining subsystems; `None` when the
    /// outcome has zero probability.
    pub conditional: Option<ComplexVector>,
}

/// Projects subsystem `k` onto `onto` and returns the outcome probability
/// with the conditional state of the other subsystems.
pub fn project_subsystem(
    state: &ComplexVector,
    dims: &[usize],
    k: usize,
    onto: &ComplexVector,
) -> Result<Projection> {
    let residual = partial_inner(state, dims, k, onto)?;
    let probability = residual.norm().powi(2);
    let conditional = if probability > ZERO_PROBABILITY {
        Some(residual.normalized()?)
    } else {
        None
    };
    Ok(Projection {
        probability: probability.min(1.0),
        conditional,
    })
}

/// `(<onto|_k ⊗ I) |state>`, unnormalized.
pub(crate) fn partial_inner(
    state: &ComplexVector,
    dims: &[usize],
    k: usize,
    onto: &ComplexVector,
) -> Result<ComplexVector> {
    let layout = Layout::new(dims)?;
    let dk = layout.check_subsystem(k)?;
    if layout.total() != state.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state dim {} does not match subsystem dims {dims:?}",
            state.dim()
        )));
    }
    if onto.dim() != dk {
        return Err(Error::DimensionMismatch(format!(
            "projection vector of dim {} on subsystem of dim {dk}",
            onto.dim()
        )));
    }
    if dims.len() == 1 {
        return ComplexVector::new(vec![onto.inner(state)?]);
    }
    let mut out = vec![ZERO; layout.total() / dk];
    for (idx, &amp) in state.data.iter().enumerate() {
        out[layout.drop_digit(idx, k)] += onto.data[layout.digit(idx, k)].conj() * amp;
    }
    Ok(ComplexVector { data: out })
}

/// Partial trace keeping the subsystems listed in `keep` (in register order).
pub fn partial_trace(rho: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    let layout = Layout::new(dims)?;
    if rho.dim()? != layout.total() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix on register {dims:?}",
            rho.rows, rho.cols
        )));
    }
    for &k in keep {
        layout.check_subsystem(k)?;
    }
    rho.validate_density_matrix()?;

    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !kept.contains(k)).collect();
    let kept_dims: Vec<usize> = kept.iter().map(|&k| dims[k]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let kept_total: usize = kept_dims.iter().product();
    let traced_total: usize = traced_dims.iter().product();

    let compose = |kept_idx: usize, traced_idx: usize| -> usize {
        let mut idx = 0;
        let mut rem_k = kept_idx;
        let mut rem_t = traced_idx;
        let mut digits = vec![0; dims.len()];
        for (pos, &k) in kept.iter().enumerate().rev() {
            digits[k] = rem_k % kept_dims[pos];
            rem_k /= kept_dims[pos];
        }
        for (pos, &k) in traced.iter().enumerate().rev() {
            digits[k] = rem_t % traced_dims[pos];
            rem_t /= traced_dims[pos];
        }
        for (k, &dgt) in digits.iter().enumerate() {
            idx += dgt * layout.strides[k];
        }
        idx
    };

    let mut out = ComplexMatrix::zeros(kept_total, kept_total);
    for a in 0..kept_total {
        for b in 0..kept_total {
            out[(a, b)] = (0..traced_total)
                .map(|t| rho[(compose(a, t), compose(b, t))])
                .sum();
        }
    }
    out.hermitian_part()
}

/// Half the sum of singular values of `r1 - r2`.
pub fn trace_distance(r1: &ComplexMatrix, r2: &ComplexMatrix) -> Result<f64> {
    r1.check_same_shape(r2)?;
    r1.dim()?;
    Ok(0.5 * (r1 - r2).singular_values().iter().sum::<f64>())
}

/// `|<v1|v2>|²` of the normalized inputs; insensitive to global phase.
pub fn fidelity_up_to_phase(v1: &ComplexVector, v2: &ComplexVector) -> Result<f64> {
    let a = v1.normalized()?;
    let b = v2.normalized()?;
    Ok(a.inner(&b)?.norm_sqr().clamp(0.0, 1.0))
}
