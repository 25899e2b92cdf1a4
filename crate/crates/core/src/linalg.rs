//! Dense complex linear algebra.
//!
//! Matrices are stored row-major. Products and Hermitian eigendecompositions
//! of anything beyond a few dozen rows are delegated to `faer`, always with
//! sequential parallelism so a result never depends on the thread pool that
//! happens to run it. Parallelism lives one level up, across independent
//! work items.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};
use std::sync::atomic::{AtomicUsize, Ordering};

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::evd::{self, ComputeEigenvectors};
use faer::linalg::matmul::triangular::{self, BlockStructure};
use faer::{Accum, MatMut, MatRef, Par};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

const DEFAULT_MAX_QUBITS: usize = 14;
static MAX_QUBITS: AtomicUsize = AtomicUsize::new(DEFAULT_MAX_QUBITS);

/// Largest register (in qubits) any dense operator may span.
pub fn max_qubits() -> usize {
    MAX_QUBITS.load(Ordering::Relaxed)
}

/// Sets the register-size guard. Returns the previous value.
pub fn set_max_qubits(n: usize) -> usize {
    MAX_QUBITS.swap(n, Ordering::Relaxed)
}

/// Number of qubits spanned by a dimension, if it is a power of two.
pub fn qubits_for_dim(dim: usize) -> Option<usize> {
    if dim.is_power_of_two() {
        Some(dim.trailing_zeros() as usize)
    } else {
        None
    }
}

pub(crate) fn check_dim_guard(dim: usize) -> Result<()> {
    let limit = max_qubits();
    let qubits = (usize::BITS - dim.saturating_sub(1).leading_zeros()) as usize;
    if qubits > limit {
        return Err(Error::DimensionGuard { qubits, limit });
    }
    Ok(())
}

/// A dense complex matrix in row-major order.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    /// `[re, im]` pairs, row-major.
    entries: Vec<[f64; 2]>,
}

impl TryFrom<MatrixRepr> for ComplexMatrix {
    type Error = Error;

    fn try_from(repr: MatrixRepr) -> Result<Self> {
        let data = repr.entries.iter().map(|[re, im]| C64::new(*re, *im)).collect();
        ComplexMatrix::from_vec(repr.rows, repr.cols, data)
    }
}

impl From<ComplexMatrix> for MatrixRepr {
    fn from(m: ComplexMatrix) -> Self {
        MatrixRepr {
            rows: m.rows,
            cols: m.cols,
            entries: m.data.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows.min(16) {
            write!(f, "  ")?;
            for j in 0..self.cols.min(16) {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    /// Builds a matrix from row-major entries, rejecting wrong lengths and
    /// non-finite values.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(k) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite(k / cols.max(1), k % cols.max(1)));
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    /// Real-valued rows, convenient for hand-written operators.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        Self::from_fn(r, c, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, z) in entries.iter().enumerate() {
            m[(i, i)] = *z;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub(crate) fn faer(&self) -> MatRef<'_, C64> {
        MatRef::from_row_major_slice(&self.data, self.rows, self.cols)
    }

    pub(crate) fn faer_mut(&mut self) -> MatMut<'_, C64> {
        MatMut::from_row_major_slice_mut(&mut self.data, self.rows, self.cols)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: C64) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// `tr(self · other)` without forming the product.
    pub fn trace_of_product(&self, other: &ComplexMatrix) -> C64 {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.rows, other.cols);
        let mut acc = ZERO;
        for i in 0..self.rows {
            let row = self.row(i);
            for (k, a) in row.iter().enumerate() {
                acc += a * other[(k, i)];
            }
        }
        acc
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |A − A†|`.
    pub fn hermiticity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut err: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                err = err.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        err
    }

    /// `max |U†U − I|`.
    pub fn unitarity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let gram = self.adjoint_matmul(self);
        gram.max_abs_diff(&Self::identity(self.rows))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_error() < tol
    }

    /// `self · rhs`.
    pub fn matmul(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matmul inner dimensions");
        gemm(self.faer(), rhs.faer(), self.rows, rhs.cols, self.cols)
    }

    /// `self† · rhs`.
    pub fn adjoint_matmul(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.rows, rhs.rows, "adjoint_matmul inner dimensions");
        // faer is several times slower on a conjugated transposed view than
        // on an explicit copy
        gemm(self.adjoint().faer(), rhs.faer(), self.cols, rhs.cols, self.rows)
    }

    /// `self · rhs†`.
    pub fn matmul_adjoint(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.cols, "matmul_adjoint inner dimensions");
        gemm(self.faer(), rhs.faer().adjoint(), self.rows, rhs.rows, self.cols)
    }

    /// `self · self†`. Only the lower triangle is multiplied out; the upper
    /// one is its mirror, so the result is exactly Hermitian.
    pub fn gram(&self) -> ComplexMatrix {
        let n = self.rows;
        if n * n * self.cols <= SMALL_GEMM {
            let mut out = self.matmul_adjoint(self);
            out.symmetrize();
            return out;
        }
        let mut out = ComplexMatrix::zeros(n, n);
        triangular::matmul(
            out.faer_mut(),
            BlockStructure::TriangularLower,
            Accum::Replace,
            self.faer(),
            BlockStructure::Rectangular,
            self.faer().adjoint(),
            BlockStructure::Rectangular,
            ONE,
            Par::Seq,
        );
        for i in 0..n {
            out.data[i * n + i].im = 0.0;
            for j in 0..i {
                out.data[j * n + i] = out.data[i * n + j].conj();
            }
        }
        out
    }

    /// `self · x` for a column vector.
    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, x.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `U · self · U†`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> ComplexMatrix {
        u.matmul(self).matmul_adjoint(u)
    }

    /// Replaces `self` with `(self + self†)/2`.
    pub fn symmetrize(&mut self) {
        assert!(self.is_square());
        let n = self.rows;
        for i in 0..n {
            for j in i..n {
                let avg = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
                self[(i, j)] = avg;
                self[(j, i)] = avg.conj();
            }
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
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
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

// Below this many multiply-adds the faer dispatch costs more than it saves.
const SMALL_GEMM: usize = 32 * 32 * 32;

fn gemm<L, R>(lhs: MatRef<'_, L>, rhs: MatRef<'_, R>, m: usize, n: usize, k: usize) -> ComplexMatrix
where
    L: faer::traits::Conjugate<Canonical = C64>,
    R: faer::traits::Conjugate<Canonical = C64>,
{
    let mut out = ComplexMatrix::zeros(m, n);
    if m * n * k <= SMALL_GEMM {
        let lhs_c = materialize(lhs);
        let rhs_c = materialize(rhs);
        for i in 0..m {
            for p in 0..k {
                let a = lhs_c[i * k + p];
                if a == ZERO {
                    continue;
                }
                let row = &rhs_c[p * n..(p + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        return out;
    }
    faer::linalg::matmul::matmul(out.faer_mut(), Accum::Replace, lhs, rhs, ONE, Par::Seq);
    out
}

fn materialize<T>(m: MatRef<'_, T>) -> Vec<C64>
where
    T: faer::traits::Conjugate<Canonical = C64>,
{
    let owned = m.to_owned();
    let mut v = Vec::with_capacity(owned.nrows() * owned.ncols());
    for i in 0..owned.nrows() {
        for j in 0..owned.ncols() {
            v.push(owned[(i, j)]);
        }
    }
    v
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let rows = a.rows.checked_mul(b.rows).ok_or_else(|| overflow(a, b))?;
    let cols = a.cols.checked_mul(b.cols).ok_or_else(|| overflow(a, b))?;
    check_dim_guard(rows.max(cols))?;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let s = a[(i, j)];
            if s == ZERO {
                continue;
            }
            for k in 0..b.rows {
                for l in 0..b.cols {
                    out[(i * b.rows + k, j * b.cols + l)] = s * b[(k, l)];
                }
            }
        }
    }
    Ok(out)
}

fn overflow(a: &ComplexMatrix, b: &ComplexMatrix) -> Error {
    Error::DimensionMismatch(format!(
        "kron of {}x{} and {}x{} overflows",
        a.rows, a.cols, b.rows, b.cols
    ))
}

/// A matrix known to be Hermitian within `HERMITIAN_TOL` entrywise.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(ComplexMatrix);

pub const HERMITIAN_TOL: f64 = 1e-12;

impl HermitianMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let err = m.hermiticity_error();
        if err > HERMITIAN_TOL {
            return Err(Error::NotHermitian(err));
        }
        Ok(HermitianMatrix(m))
    }

    pub fn dim(&self) -> usize {
        self.0.rows
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }
}

/// Eigenvalues in ascending order with the matching eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    /// `V Λ V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.with_function(|l| C64::new(l, 0.0))
    }

    /// `V f(Λ) V†`.
    pub fn with_function(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let diag: Vec<C64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut scaled = v.clone();
        for i in 0..scaled.rows {
            for (j, d) in diag.iter().enumerate() {
                scaled[(i, j)] *= d;
            }
        }
        scaled.matmul_adjoint(v)
    }

    /// `exp(−iHt)`.
    pub fn propagator(&self, t: f64) -> ComplexMatrix {
        self.with_function(|l| C64::from_polar(1.0, -l * t))
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Purely real input (the spin-bath Hamiltonians are real symmetric) goes
/// through the real solver, which is several times faster.
pub fn hermitian_eig(h: &HermitianMatrix) -> Result<Spectrum> {
    let m = &h.0;
    let n = m.rows;
    if n == 0 {
        return Ok(Spectrum { eigenvalues: vec![], eigenvectors: ComplexMatrix::zeros(0, 0) });
    }
    if m.data.iter().all(|z| z.im == 0.0) {
        let real = faer::Mat::<f64>::from_fn(n, n, |i, j| m[(i, j)].re);
        let (vals, vecs) = evd_dense(real.as_ref())?;
        let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| C64::new(vecs[(i, j)], 0.0));
        return Ok(Spectrum { eigenvalues: vals, eigenvectors });
    }
    let (vals, vecs) = evd_dense(m.faer())?;
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| vecs[(i, j)]);
    Ok(Spectrum { eigenvalues: vals, eigenvectors })
}

fn evd_dense<T>(a: MatRef<'_, T>) -> Result<(Vec<f64>, faer::Mat<T>)>
where
    T: faer::traits::ComplexField<Real = f64>,
{
    let n = a.nrows();
    let mut s = faer::diag::Diag::<T>::zeros(n);
    let mut u = faer::Mat::<T>::zeros(n, n);
    let mut mem = MemBuffer::new(evd::self_adjoint_evd_scratch::<T>(
        n,
        ComputeEigenvectors::Yes,
        Par::Seq,
        Default::default(),
    ));
    evd::self_adjoint_evd(
        a,
        s.as_mut(),
        Some(u.as_mut()),
        Par::Seq,
        MemStack::new(&mut mem),
        Default::default(),
    )
    .map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let vals = (0..n).map(|i| T::real_part_impl(&s[i])).collect();
    Ok((vals, u))
}

/// `exp(−iHt)` by exact spectral decomposition.
pub fn propagator(h: &HermitianMatrix, t: f64) -> Result<ComplexMatrix> {
    if !t.is_finite() {
        return Err(Error::InvalidArgument(format!("time {t} is not finite")));
    }
    Ok(hermitian_eig(h)?.propagator(t))
}

/// Householder QR of a square matrix: `a = Q R`.
pub fn qr(a: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    assert!(a.is_square(), "qr expects a square matrix");
    let n = a.rows;
    let mut r = a.clone();
    let mut q = ComplexMatrix::identity(n);
    let mut v = vec![ZERO; n];
    for k in 0..n.saturating_sub(1) {
        let norm_x = (k..n).map(|i| r[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm_x == 0.0 {
            continue;
        }
        let x0 = r[(k, k)];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { ONE };
        let alpha = -phase * norm_x;
        for i in k..n {
            v[i] = r[(i, k)];
        }
        v[k] -= alpha;
        let vnorm = (k..n).map(|i| v[i].norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for vi in &mut v[k..n] {
            *vi /= vnorm;
        }
        // R ← (I − 2vv†) R
        for j in k..n {
            let dot: C64 = (k..n).map(|i| v[i].conj() * r[(i, j)]).sum();
            for i in k..n {
                let vi = v[i];
                r[(i, j)] -= vi * dot * 2.0;
            }
        }
        // Q ← Q (I − 2vv†)
        for i in 0..n {
            let dot: C64 = (k..n).map(|l| q[(i, l)] * v[l]).sum();
            for l in k..n {
                let vl = v[l];
                q[(i, l)] -= dot * vl.conj() * 2.0;
            }
        }
        for i in (k + 1)..n {
            r[(i, k)] = ZERO;
        }
    }
    (q, r)
}

/// Draws a unitary from the Haar measure on U(dim).
///
/// Ginibre matrix, Householder QR, then each column of Q is rotated by the
/// phase of the matching diagonal entry of R so that R has a positive
/// diagonal. Without that last step the distribution is not Haar.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    assert!(dim >= 1, "haar_unitary needs dim >= 1");
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let ginibre = ComplexMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * scale, im * scale)
    });
    let (mut q, r) = qr(&ginibre);
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn sigma_x() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
}

pub fn sigma_y() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2, 2);
    m[(0, 1)] = -I;
    m[(1, 0)] = I;
    m
}

pub fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, seed: u64) -> HermitianMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = ComplexMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        m.symmetrize();
        HermitianMatrix::new(m).unwrap()
    }

    #[test]
    fn gram_is_hermitian_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = ComplexMatrix::from_fn(60, 37, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
        let g = a.gram();
        assert!(g.max_abs_diff(&a.matmul_adjoint(&a)) < 1e-12);
        assert_eq!(g, g.adjoint());
    }

    #[test]
    fn kron_identities() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2).unwrap(), ComplexMatrix::identity(4));
        let zi = kron(&sigma_z(), &i2).unwrap();
        let expected = ComplexMatrix::diagonal(&[ONE, ONE, -ONE, -ONE]);
        assert_eq!(zi, expected);
    }

    #[test]
    fn kron_index_formula() {
        let a = sigma_x();
        let b = sigma_z();
        let k = kron(&a, &b).unwrap();
        // (a⊗b)[(i·2+k),(j·2+l)] = a[i,j]·b[k,l] with i=0,k=1,j=1,l=1
        let direct = a[(0, 1)] * b[(1, 1)];
        assert_eq!(k[(1, 3)], direct);
        assert_eq!(k[(1, 3)], -ONE);
    }

    #[test]
    fn kron_guard() {
        let prev = set_max_qubits(3);
        let i4 = ComplexMatrix::identity(4);
        let res = kron(&i4, &i4);
        set_max_qubits(prev);
        assert!(matches!(res, Err(Error::DimensionGuard { qubits: 4, limit: 3 })));
    }

    #[test]
    fn eig_of_paulis() {
        let s = hermitian_eig(&HermitianMatrix::new(sigma_z()).unwrap()).unwrap();
        assert_eq!(s.eigenvalues, vec![-1.0, 1.0]);
        let s = hermitian_eig(&HermitianMatrix::new(sigma_x()).unwrap()).unwrap();
        assert!((s.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((s.eigenvalues[1] - 1.0).abs() < 1e-14);
        let v0 = s.eigenvectors.column(0);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        // (1, −1)/√2 up to phase
        let overlap = (v0[0] * r - v0[1] * r).norm();
        assert!((overlap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eig_reconstructs_random_hermitian() {
        let h = random_hermitian(16, 7);
        let s = hermitian_eig(&h).unwrap();
        assert!(s.reconstruct().max_abs_diff(h.matrix()) < 1e-10);
        assert!(s.eigenvectors.is_unitary(1e-10));
        assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut m = sigma_x();
        m[(0, 1)] = C64::new(2.0, 0.0);
        assert!(matches!(HermitianMatrix::new(m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn propagator_diagonal_case() {
        let h = HermitianMatrix::new(sigma_z()).unwrap();
        let u = propagator(&h, std::f64::consts::FRAC_PI_2).unwrap();
        let expected = ComplexMatrix::diagonal(&[-I, I]);
        assert!(u.max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn propagator_group_laws() {
        let h = random_hermitian(8, 3);
        let s = hermitian_eig(&h).unwrap();
        let (t1, t2) = (0.37, 1.21);
        let forward = s.propagator(t1);
        let back = s.propagator(-t1);
        assert!(forward.matmul(&back).max_abs_diff(&ComplexMatrix::identity(8)) < 1e-10);
        let joint = s.propagator(t1 + t2);
        let product = s.propagator(t1).matmul(&s.propagator(t2));
        assert!(joint.max_abs_diff(&product) < 1e-10);
        assert!(s.propagator(0.0).max_abs_diff(&ComplexMatrix::identity(8)) < 1e-12);
        assert!(forward.is_unitary(1e-10));
    }

    #[test]
    fn qr_factors() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = ComplexMatrix::from_fn(5, 5, |_, _| {
            C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let (q, r) = qr(&a);
        assert!(q.is_unitary(1e-12));
        assert!(q.matmul(&r).max_abs_diff(&a) < 1e-12);
        for i in 0..5 {
            for j in 0..i {
                assert_eq!(r[(i, j)], ZERO);
            }
        }
    }

    #[test]
    fn haar_samples_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for dim in [2, 3, 4, 8, 16] {
            let u = haar_unitary(dim, &mut rng);
            assert!(u.unitarity_error() < 1e-10, "dim {dim}");
        }
    }

    #[test]
    fn large_products_match_naive() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = ComplexMatrix::from_fn(40, 50, |_, _| C64::new(rng.random(), rng.random()));
        let b = ComplexMatrix::from_fn(50, 45, |_, _| C64::new(rng.random(), rng.random()));
        let fast = a.matmul(&b);
        let naive = ComplexMatrix::from_fn(40, 45, |i, j| (0..50).map(|k| a[(i, k)] * b[(k, j)]).sum());
        assert!(fast.max_abs_diff(&naive) < 1e-12);
        let ab = a.adjoint_matmul(&a);
        assert!(ab.max_abs_diff(&a.adjoint().matmul(&a)) < 1e-12);
        let aa = b.matmul_adjoint(&b);
        assert!(aa.max_abs_diff(&b.matmul(&b.adjoint())) < 1e-12);
    }

    #[test]
    fn matrix_serde_round_trip() {
        let m = sigma_y();
        let json = serde_json::to_string(&m).unwrap();
        let back: ComplexMatrix = serde_json::from_str(&json).unwrap();
        assert_eq!(m, back);
        assert!(serde_json::from_str::<ComplexMatrix>(r#"{"rows":2,"cols":2,"entries":[[1,0]]}"#).is_err());
    }
}
