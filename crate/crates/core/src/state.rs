//! Qubit states, Bloch-axis operators, partial traces, measurement channels
//! and single-qubit tomography.
//!
//! Qubit 0 is the left-most tensor factor (the most significant bit of a
//! basis index) and plays the role of the central qubit.

use rand::Rng;
use rand_distr::{Binomial, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    self, check_dim_guard, hermitian_eig, sigma_x, sigma_y, sigma_z, ComplexMatrix, HermitianMatrix, C64,
    ONE, ZERO,
};

const AXIS_TOL: f64 = 1e-12;
const STATE_NORM_TOL: f64 = 1e-10;
const DENSITY_TOL: f64 = 1e-10;
/// Eigenvalues above `-POSITIVITY_TOL` count as numerically non-negative.
pub const POSITIVITY_TOL: f64 = 1e-8;
const PROJECTOR_TOL: f64 = 1e-10;

/// A unit vector on the Bloch sphere.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct BlochAxis {
    x: f64,
    y: f64,
    z: f64,
}

impl TryFrom<[f64; 3]> for BlochAxis {
    type Error = Error;

    fn try_from([x, y, z]: [f64; 3]) -> Result<Self> {
        BlochAxis::new(x, y, z)
    }
}

impl From<BlochAxis> for [f64; 3] {
    fn from(a: BlochAxis) -> Self {
        [a.x, a.y, a.z]
    }
}

impl BlochAxis {
    pub const X: BlochAxis = BlochAxis { x: 1.0, y: 0.0, z: 0.0 };
    pub const Y: BlochAxis = BlochAxis { x: 0.0, y: 1.0, z: 0.0 };
    pub const Z: BlochAxis = BlochAxis { x: 0.0, y: 0.0, z: 1.0 };

    /// Accepts only vectors of unit length (within 1e-12).
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || (x * x + y * y + z * z - 1.0).abs() > AXIS_TOL {
            return Err(Error::InvalidAxis { x, y, z, norm });
        }
        Ok(BlochAxis { x, y, z })
    }

    /// Normalizes any non-zero finite vector.
    pub fn normalized(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::InvalidAxis { x, y, z, norm });
        }
        Ok(BlochAxis { x: x / norm, y: y / norm, z: z / norm })
    }

    /// Uniform draw from the sphere.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let x: f64 = rng.sample(StandardNormal);
            let y: f64 = rng.sample(StandardNormal);
            let z: f64 = rng.sample(StandardNormal);
            if let Ok(a) = Self::normalized(x, y, z) {
                return a;
            }
        }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn components(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(&self, other: &BlochAxis) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn flipped(&self) -> Self {
        BlochAxis { x: -self.x, y: -self.y, z: -self.z }
    }
}

/// Outcome of a two-valued projective measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub fn sign(self) -> f64 {
        match self {
            Outcome::Plus => 1.0,
            Outcome::Minus => -1.0,
        }
    }
}

/// `x·σx + y·σy + z·σz`.
pub fn pauli_along(axis: &BlochAxis) -> ComplexMatrix {
    let [x, y, z] = axis.components();
    ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => C64::new(z, 0.0),
        (1, 1) => C64::new(-z, 0.0),
        (0, 1) => C64::new(x, -y),
        _ => C64::new(x, y),
    })
}

/// `(I ± σ_axis)/2`.
pub fn projector_along(axis: &BlochAxis, outcome: Outcome) -> ComplexMatrix {
    let s = outcome.sign();
    let p = pauli_along(axis);
    ComplexMatrix::from_fn(2, 2, |i, j| {
        let id = if i == j { ONE } else { ZERO };
        (id + p[(i, j)] * s) * 0.5
    })
}

/// Index of the bit holding `qubit` in an `n`-qubit basis index.
#[inline]
pub(crate) fn bit_shift(qubit: usize, n: usize) -> usize {
    n - 1 - qubit
}

/// `I ⊗ … ⊗ op ⊗ … ⊗ I` with `op` acting on `target`.
pub fn embed(op: &ComplexMatrix, target: usize, n: usize) -> Result<ComplexMatrix> {
    if op.rows() != 2 || op.cols() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "embed expects a 2x2 operator, got {}x{}",
            op.rows(),
            op.cols()
        )));
    }
    if target >= n {
        return Err(Error::QubitIndex { index: target, n_qubits: n });
    }
    check_dim_guard(1 << n)?;
    let dim = 1usize << n;
    let shift = bit_shift(target, n);
    let mask = 1usize << shift;
    let mut out = ComplexMatrix::zeros(dim, dim);
    for row in 0..dim {
        let rb = (row >> shift) & 1;
        let rest = row & !mask;
        for cb in 0..2 {
            let col = rest | (cb << shift);
            out[(row, col)] = op[(rb, cb)];
        }
    }
    Ok(out)
}

/// Left-multiplies `m` in place by a single-qubit operator on `target`.
pub(crate) fn apply_single_qubit_rows(op: &ComplexMatrix, target: usize, n: usize, m: &mut ComplexMatrix) {
    let shift = bit_shift(target, n);
    let mask = 1usize << shift;
    let cols = m.cols();
    let (a, b, c, d) = (op[(0, 0)], op[(0, 1)], op[(1, 0)], op[(1, 1)]);
    let data = m.as_mut_slice();
    for r0 in 0..(1usize << n) {
        if r0 & mask != 0 {
            continue;
        }
        let r1 = r0 | mask;
        for j in 0..cols {
            let x0 = data[r0 * cols + j];
            let x1 = data[r1 * cols + j];
            data[r0 * cols + j] = a * x0 + b * x1;
            data[r1 * cols + j] = c * x0 + d * x1;
        }
    }
}

/// A normalized state vector on `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let n_qubits = linalg::qubits_for_dim(amplitudes.len()).ok_or_else(|| {
            Error::DimensionMismatch(format!("{} amplitudes is not a power of two", amplitudes.len()))
        })?;
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > STATE_NORM_TOL {
            return Err(Error::InvalidState(format!("state norm {norm}")));
        }
        Ok(PureState { n_qubits, amplitudes })
    }

    /// Normalizes the given amplitudes.
    pub fn normalized(mut amplitudes: Vec<C64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("zero vector".into()));
        }
        for z in &mut amplitudes {
            *z /= norm;
        }
        Self::new(amplitudes)
    }

    /// `|0…0⟩`.
    pub fn zero(n_qubits: usize) -> Self {
        let mut amplitudes = vec![ZERO; 1 << n_qubits];
        amplitudes[0] = ONE;
        PureState { n_qubits, amplitudes }
    }

    /// The single-qubit state whose Bloch vector is `axis`.
    pub fn along(axis: &BlochAxis) -> Self {
        let [x, y, z] = axis.components();
        let up = ((1.0 + z) / 2.0).sqrt();
        let amplitudes = if up > 1e-12 {
            vec![C64::new(up, 0.0), C64::new(x, y) / (2.0 * (1.0 + z)).sqrt()]
        } else {
            vec![ZERO, ONE]
        };
        PureState { n_qubits: 1, amplitudes }
    }

    /// Tensor product of single-qubit states along the given axes.
    pub fn product(axes: &[BlochAxis]) -> Result<Self> {
        check_dim_guard(1 << axes.len())?;
        let mut amps = vec![ONE];
        for axis in axes {
            let q = PureState::along(axis);
            amps = amps
                .iter()
                .flat_map(|a| q.amplitudes.iter().map(move |b| a * b))
                .collect();
        }
        Ok(PureState { n_qubits: axes.len(), amplitudes: amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        check_dim_guard(1 << (self.n_qubits + other.n_qubits))?;
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        Ok(PureState { n_qubits: self.n_qubits + other.n_qubits, amplitudes })
    }

    pub fn density(&self) -> DensityMatrix {
        let a = &self.amplitudes;
        let m = ComplexMatrix::from_fn(a.len(), a.len(), |i, j| a[i] * a[j].conj());
        DensityMatrix::from_matrix_unchecked(m)
    }
}

/// A density matrix on `n` qubits: Hermitian, unit trace, positive
/// semidefinite up to [`POSITIVITY_TOL`].
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, trace and positivity.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let rho = Self::validated_shape(matrix)?;
        let herm = rho.matrix.hermiticity_error();
        if herm > DENSITY_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {herm:e})")));
        }
        let tr = rho.matrix.trace();
        if (tr.re - 1.0).abs() > DENSITY_TOL || tr.im.abs() > DENSITY_TOL {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        let min = rho.min_eigenvalue()?;
        if min < -POSITIVITY_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(rho)
    }

    fn validated_shape(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch("density matrix must be square".into()));
        }
        let n_qubits = linalg::qubits_for_dim(matrix.rows()).ok_or_else(|| {
            Error::DimensionMismatch(format!("dimension {} is not a power of two", matrix.rows()))
        })?;
        Ok(DensityMatrix { n_qubits, matrix })
    }

    /// For operations that preserve validity by construction.
    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        let n_qubits = linalg::qubits_for_dim(matrix.rows()).expect("power-of-two dimension");
        DensityMatrix { n_qubits, matrix }
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        DensityMatrix {
            n_qubits,
            matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    /// `(I + r·σ)/2` for a Bloch vector of length at most one.
    pub fn from_bloch(r: [f64; 3]) -> Result<Self> {
        let len2 = r.iter().map(|c| c * c).sum::<f64>();
        if len2 > 1.0 + 1e-12 {
            return Err(Error::InvalidState(format!("Bloch vector length {}", len2.sqrt())));
        }
        Ok(Self::from_bloch_unchecked(r))
    }

    fn from_bloch_unchecked([x, y, z]: [f64; 3]) -> Self {
        let m = ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => C64::new((1.0 + z) / 2.0, 0.0),
            (1, 1) => C64::new((1.0 - z) / 2.0, 0.0),
            (0, 1) => C64::new(x, -y) / 2.0,
            _ => C64::new(x, y) / 2.0,
        });
        DensityMatrix { n_qubits: 1, matrix: m }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        let mut m = self.matrix.clone();
        m.symmetrize();
        let spec = hermitian_eig(&HermitianMatrix::new(m)?)?;
        Ok(spec.eigenvalues.first().copied().unwrap_or(0.0))
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        Ok(DensityMatrix::from_matrix_unchecked(linalg::kron(&self.matrix, &other.matrix)?))
    }

    /// `U ρ U†`.
    pub fn evolve(&self, u: &ComplexMatrix) -> Result<DensityMatrix> {
        if u.rows() != self.dim() || u.cols() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} unitary on a {}-dimensional state",
                u.rows(),
                u.cols(),
                self.dim()
            )));
        }
        let mut m = self.matrix.conjugate_by(u);
        m.symmetrize();
        Ok(DensityMatrix::from_matrix_unchecked(m))
    }

    /// Bloch vector of a single-qubit state.
    pub fn bloch_vector(&self) -> Result<[f64; 3]> {
        if self.n_qubits != 1 {
            return Err(Error::DimensionMismatch("Bloch vector needs a single qubit".into()));
        }
        let m = &self.matrix;
        Ok([2.0 * m[(0, 1)].re, -2.0 * m[(0, 1)].im, (m[(0, 0)] - m[(1, 1)]).re])
    }

    /// `½‖ρ − σ‖₁`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch("trace distance of different dimensions".into()));
        }
        if self.n_qubits == 1 {
            let a = self.bloch_vector()?;
            let b = other.bloch_vector()?;
            let d = a.iter().zip(&b).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
            return Ok(d / 2.0);
        }
        let mut diff = &self.matrix - &other.matrix;
        diff.symmetrize();
        let spec = hermitian_eig(&HermitianMatrix::new(diff)?)?;
        Ok(spec.eigenvalues.iter().map(|l| l.abs()).sum::<f64>() / 2.0)
    }
}

/// Reduced density matrix over the `keep` qubits (in ascending order).
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    if keep.is_empty() {
        return Err(Error::EmptyKeep);
    }
    let n = rho.n_qubits;
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if let Some(&bad) = kept.iter().find(|&&q| q >= n) {
        return Err(Error::QubitIndex { index: bad, n_qubits: n });
    }
    let traced: Vec<usize> = (0..n).filter(|q| !kept.contains(q)).collect();
    let compose = |k: usize, e: usize| -> usize {
        let mut full = 0usize;
        for (pos, &q) in kept.iter().enumerate() {
            let bit = (k >> (kept.len() - 1 - pos)) & 1;
            full |= bit << bit_shift(q, n);
        }
        for (pos, &q) in traced.iter().enumerate() {
            let bit = (e >> (traced.len() - 1 - pos)) & 1;
            full |= bit << bit_shift(q, n);
        }
        full
    };
    let dk = 1usize << kept.len();
    let de = 1usize << traced.len();
    let index: Vec<Vec<usize>> = (0..dk).map(|k| (0..de).map(|e| compose(k, e)).collect()).collect();
    let m = &rho.matrix;
    let mut out = ComplexMatrix::zeros(dk, dk);
    for a in 0..dk {
        for b in 0..dk {
            out[(a, b)] = (0..de).map(|e| m[(index[a][e], index[b][e])]).sum();
        }
    }
    out.symmetrize();
    Ok(DensityMatrix::from_matrix_unchecked(out))
}

/// Central-qubit reduction of a state vector: `tr_B |ψ⟩⟨ψ|`, unnormalized.
pub(crate) fn reduce_to_first_qubit(psi: &[C64]) -> [[C64; 2]; 2] {
    let half = psi.len() / 2;
    let (lo, hi) = psi.split_at(half);
    let mut r = [[ZERO; 2]; 2];
    for e in 0..half {
        r[0][0] += lo[e] * lo[e].conj();
        r[0][1] += lo[e] * hi[e].conj();
        r[1][1] += hi[e] * hi[e].conj();
    }
    r[1][0] = r[0][1].conj();
    r
}

fn check_projector(p: &ComplexMatrix, dim: usize) -> Result<()> {
    if p.rows() != dim || p.cols() != dim {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} projector on a {dim}-dimensional state",
            p.rows(),
            p.cols()
        )));
    }
    let herm = p.hermiticity_error();
    let idem = p.matmul(p).max_abs_diff(p);
    let err = herm.max(idem);
    if err > PROJECTOR_TOL {
        return Err(Error::NotProjector(err));
    }
    Ok(())
}

/// `PρP + (I−P)ρ(I−P)`.
pub fn measure_nonselective(rho: &DensityMatrix, p: &ComplexMatrix) -> Result<DensityMatrix> {
    check_projector(p, rho.dim())?;
    let q = &ComplexMatrix::identity(rho.dim()) - p;
    let a = p.matmul(&rho.matrix).matmul(p);
    let b = q.matmul(&rho.matrix).matmul(&q);
    let mut m = &a + &b;
    m.symmetrize();
    Ok(DensityMatrix::from_matrix_unchecked(m))
}

/// Probability of the projector's outcome and the normalized post-measurement
/// state.
pub fn measure_selective(rho: &DensityMatrix, p: &ComplexMatrix) -> Result<(f64, DensityMatrix)> {
    check_projector(p, rho.dim())?;
    let mut post = p.matmul(&rho.matrix).matmul(p);
    let prob = post.trace().re;
    if prob < 1e-14 {
        return Err(Error::DegenerateBranch(prob));
    }
    post = post.scale_real(1.0 / prob);
    post.symmetrize();
    Ok((prob.min(1.0), DensityMatrix::from_matrix_unchecked(post)))
}

/// `tr(ρ·op)`, checked to be real.
pub fn expectation(rho: &DensityMatrix, op: &ComplexMatrix) -> Result<f64> {
    if op.rows() != rho.dim() || op.cols() != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} operator on a {}-dimensional state",
            op.rows(),
            op.cols(),
            rho.dim()
        )));
    }
    let v = rho.matrix.trace_of_product(op);
    if v.im.abs() > 1e-8 {
        return Err(Error::NumericalConsistency(v.im.abs()));
    }
    Ok(v.re)
}

/// Linear-inversion tomography of one qubit from its Pauli expectations.
/// Vectors outside the Bloch ball are pulled back onto its surface.
pub fn tomography(ex: f64, ey: f64, ez: f64) -> DensityMatrix {
    DensityMatrix::from_bloch_unchecked(clamp_to_ball([ex, ey, ez]))
}

pub(crate) fn clamp_to_ball(v: [f64; 3]) -> [f64; 3] {
    let len = v.iter().map(|c| c * c).sum::<f64>().sqrt();
    if len > 1.0 {
        [v[0] / len, v[1] / len, v[2] / len]
    } else {
        v
    }
}

/// Finite-shot estimates of `⟨σx⟩, ⟨σy⟩, ⟨σz⟩`: for each axis `k` successes
/// out of `shots` are drawn binomially and reported as `2k/shots − 1`.
pub fn sample_expectations<R: Rng + ?Sized>(rho: &DensityMatrix, shots: u64, rng: &mut R) -> Result<[f64; 3]> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    let exact = rho.bloch_vector()?;
    let mut out = [0.0; 3];
    for (slot, e) in out.iter_mut().zip(exact) {
        let p = ((1.0 + e) / 2.0).clamp(0.0, 1.0);
        let k = Binomial::new(shots, p)
            .map_err(|err| Error::InvalidArgument(err.to_string()))?
            .sample(rng);
        *slot = 2.0 * k as f64 / shots as f64 - 1.0;
    }
    Ok(out)
}

/// `⟨ψ|ρ|ψ⟩`.
pub fn fidelity(rho: &DensityMatrix, psi: &PureState) -> Result<f64> {
    if rho.dim() != psi.amplitudes.len() {
        return Err(Error::DimensionMismatch("fidelity of different dimensions".into()));
    }
    let rho_psi = rho.matrix.apply(&psi.amplitudes);
    let v: C64 = psi.amplitudes.iter().zip(&rho_psi).map(|(a, b)| a.conj() * b).sum();
    Ok(v.re)
}

/// The three Pauli matrices.
pub fn paulis() -> [ComplexMatrix; 3] {
    [sigma_x(), sigma_y(), sigma_z()]
}
