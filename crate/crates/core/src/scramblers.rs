//! The scrambling unitaries: central spin coupled to a random spin bath,
//! layered random two-qubit circuits, and the fixed three-qubit no-hiding
//! unitary.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    check_dim_guard, haar_unitary, hermitian_eig, sigma_x, sigma_y, sigma_z, ComplexMatrix,
    HermitianMatrix, Spectrum, C64, I, ONE, ZERO,
};
use crate::state::bit_shift;

/// Central spin plus `n_bath` bath spins with Gaussian anisotropic couplings
/// `J_i^α`, stored as `couplings[i] = [J_i^x, J_i^y, J_i^z]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinBathModel {
    j_std: f64,
    couplings: Vec<[f64; 3]>,
}

impl SpinBathModel {
    pub fn from_couplings(j_std: f64, couplings: Vec<[f64; 3]>) -> Result<Self> {
        if couplings.is_empty() {
            return Err(Error::InvalidArgument("spin bath needs at least one bath spin".into()));
        }
        if couplings.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("couplings must be finite".into()));
        }
        Ok(SpinBathModel { j_std, couplings })
    }

    pub fn n_bath(&self) -> usize {
        self.couplings.len()
    }

    pub fn n_qubits(&self) -> usize {
        self.couplings.len() + 1
    }

    pub fn j_std(&self) -> f64 {
        self.j_std
    }

    pub fn couplings(&self) -> &[[f64; 3]] {
        &self.couplings
    }
}

/// Draws `3·n_bath` independent couplings with mean zero and standard
/// deviation `j_std`, bath spin by bath spin in x, y, z order.
pub fn sample_spin_bath<R: Rng + ?Sized>(n_bath: usize, j_std: f64, rng: &mut R) -> Result<SpinBathModel> {
    if n_bath == 0 {
        return Err(Error::InvalidArgument("n_bath must be at least 1".into()));
    }
    let normal = Normal::new(0.0, j_std)
        .ok()
        .filter(|_| j_std > 0.0)
        .ok_or_else(|| Error::InvalidArgument(format!("j_std must be positive, got {j_std}")))?;
    let couplings = (0..n_bath)
        .map(|_| [normal.sample(rng), normal.sample(rng), normal.sample(rng)])
        .collect();
    SpinBathModel::from_couplings(j_std, couplings)
}

/// `H = Σ_i Σ_α J_i^α S^α s_i^α` with spin-½ operators `S = σ/2`.
///
/// The matrix is real: the `σy⊗σy` terms contribute `−1` when the two bits
/// agree and `+1` when they differ.
pub fn build_hamiltonian(model: &SpinBathModel) -> Result<HermitianMatrix> {
    let n = model.n_qubits();
    check_dim_guard(1 << n)?;
    let dim = 1usize << n;
    let central = 1usize << bit_shift(0, n);
    let mut h = ComplexMatrix::zeros(dim, dim);
    for (k, &[jx, jy, jz]) in model.couplings.iter().enumerate() {
        let bath = 1usize << bit_shift(k + 1, n);
        let flip = central | bath;
        for b in 0..dim {
            let c = (b & central != 0) as i32;
            let s = (b & bath != 0) as i32;
            let zz = ((1 - 2 * c) * (1 - 2 * s)) as f64;
            h[(b, b)].re += 0.25 * jz * zz;
            let yy = if c == s { -1.0 } else { 1.0 };
            h[(b ^ flip, b)].re += 0.25 * (jx + jy * yy);
        }
    }
    HermitianMatrix::new(h)
}

/// `exp(−iHt)` for the spin-bath Hamiltonian.
pub fn spin_bath_unitary(model: &SpinBathModel, t: f64) -> Result<ComplexMatrix> {
    if !t.is_finite() {
        return Err(Error::InvalidArgument(format!("time {t} is not finite")));
    }
    Ok(spin_bath_spectrum(model)?.propagator(t))
}

pub fn spin_bath_spectrum(model: &SpinBathModel) -> Result<Spectrum> {
    hermitian_eig(&build_hamiltonian(model)?)
}

/// A Haar-random two-qubit gate on an ordered qubit pair. The first qubit of
/// the pair is the more significant bit of the 4×4 basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub qubits: (usize, usize),
    pub matrix: ComplexMatrix,
}

/// How qubits are paired within a layer.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pairing {
    /// Even layers pair (0,1),(2,3),…; odd layers pair (1,2),(3,4),… on an
    /// open chain.
    #[default]
    BrickWall,
    /// A fresh random perfect matching every layer.
    RandomPairs,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayeredCircuit {
    n_qubits: usize,
    layers: Vec<Vec<Gate>>,
}

impl LayeredCircuit {
    /// Checks ranges, per-layer disjointness and gate unitarity.
    pub fn new(n_qubits: usize, layers: Vec<Vec<Gate>>) -> Result<Self> {
        for layer in &layers {
            let mut used = vec![false; n_qubits];
            for gate in layer {
                let (a, b) = gate.qubits;
                if a >= n_qubits || b >= n_qubits || a == b {
                    return Err(Error::InvalidArgument(format!(
                        "gate on ({a}, {b}) in a {n_qubits}-qubit circuit"
                    )));
                }
                if used[a] || used[b] {
                    return Err(Error::InvalidArgument(format!("qubit reused within a layer by gate ({a}, {b})")));
                }
                used[a] = true;
                used[b] = true;
                if gate.matrix.rows() != 4 || gate.matrix.cols() != 4 {
                    return Err(Error::DimensionMismatch("gates must be 4x4".into()));
                }
                let err = gate.matrix.unitarity_error();
                if err > 1e-10 {
                    return Err(Error::NotUnitary(err));
                }
            }
        }
        Ok(LayeredCircuit { n_qubits, layers })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn layers(&self) -> &[Vec<Gate>] {
        &self.layers
    }

    fn gates(&self) -> impl DoubleEndedIterator<Item = &Gate> {
        self.layers.iter().flatten()
    }

    /// `|ψ⟩ ← U|ψ⟩`, gate by gate.
    pub fn apply(&self, psi: &mut [C64]) {
        assert_eq!(psi.len(), 1 << self.n_qubits);
        for gate in self.gates() {
            apply_two_qubit(&gate.matrix, gate.qubits, self.n_qubits, psi, 1, false);
        }
    }

    /// `|ψ⟩ ← U†|ψ⟩`.
    pub fn apply_adjoint(&self, psi: &mut [C64]) {
        assert_eq!(psi.len(), 1 << self.n_qubits);
        for gate in self.gates().rev() {
            apply_two_qubit(&gate.matrix, gate.qubits, self.n_qubits, psi, 1, true);
        }
    }
}

/// Applies a 4×4 gate (or its adjoint) to every column of a row-major block
/// with `cols` columns and `2^n` rows.
fn apply_two_qubit(g: &ComplexMatrix, (qa, qb): (usize, usize), n: usize, data: &mut [C64], cols: usize, adjoint: bool) {
    let ma = 1usize << bit_shift(qa, n);
    let mb = 1usize << bit_shift(qb, n);
    let mut gm = [[ZERO; 4]; 4];
    for (i, row) in gm.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            *slot = if adjoint { g[(j, i)].conj() } else { g[(i, j)] };
        }
    }
    for base in 0..(1usize << n) {
        if base & (ma | mb) != 0 {
            continue;
        }
        let idx = [base, base | mb, base | ma, base | ma | mb];
        for c in 0..cols {
            let x = [
                data[idx[0] * cols + c],
                data[idx[1] * cols + c],
                data[idx[2] * cols + c],
                data[idx[3] * cols + c],
            ];
            for (r, row) in gm.iter().enumerate() {
                data[idx[r] * cols + c] = row[0] * x[0] + row[1] * x[1] + row[2] * x[2] + row[3] * x[3];
            }
        }
    }
}

/// Brick-wall circuit of Haar-random two-qubit gates.
pub fn build_random_circuit<R: Rng + ?Sized>(n_qubits: usize, n_layers: usize, rng: &mut R) -> Result<LayeredCircuit> {
    build_random_circuit_with(n_qubits, n_layers, Pairing::BrickWall, rng)
}

pub fn build_random_circuit_with<R: Rng + ?Sized>(
    n_qubits: usize,
    n_layers: usize,
    pairing: Pairing,
    rng: &mut R,
) -> Result<LayeredCircuit> {
    if n_qubits < 2 {
        return Err(Error::InvalidArgument("circuits need at least 2 qubits".into()));
    }
    if n_layers == 0 {
        return Err(Error::InvalidArgument("circuits need at least 1 layer".into()));
    }
    check_dim_guard(1 << n_qubits)?;
    let mut layers = Vec::with_capacity(n_layers);
    let mut order: Vec<usize> = (0..n_qubits).collect();
    for layer in 0..n_layers {
        let pairs: Vec<(usize, usize)> = match pairing {
            Pairing::BrickWall => {
                let start = if n_qubits == 2 { 0 } else { layer % 2 };
                (start..n_qubits - 1).step_by(2).map(|a| (a, a + 1)).collect()
            }
            Pairing::RandomPairs => {
                order.shuffle(rng);
                order.chunks_exact(2).map(|p| (p[0], p[1])).collect()
            }
        };
        let gates = pairs
            .into_iter()
            .map(|qubits| Gate { qubits, matrix: haar_unitary(4, rng) })
            .collect();
        layers.push(gates);
    }
    Ok(LayeredCircuit { n_qubits, layers })
}

/// Dense unitary of the whole circuit: the ordered product of every gate.
pub fn circuit_unitary(c: &LayeredCircuit) -> Result<ComplexMatrix> {
    check_dim_guard(1 << c.n_qubits)?;
    let dim = 1usize << c.n_qubits;
    let mut u = ComplexMatrix::identity(dim);
    for gate in c.gates() {
        apply_two_qubit(&gate.matrix, gate.qubits, c.n_qubits, u.as_mut_slice(), dim, false);
    }
    Ok(u)
}

/// `I⊗|01⟩⟨00| + σx⊗|00⟩⟨01| − iσy⊗|11⟩⟨10| − σz⊗|10⟩⟨11|`, central qubit
/// as the left factor.
pub fn nohiding_unitary() -> ComplexMatrix {
    let minus_i_sigma_y = sigma_y().scale(-I);
    let minus_sigma_z = sigma_z().scale(-ONE);
    let blocks: [(ComplexMatrix, usize, usize); 4] = [
        (ComplexMatrix::identity(2), 0b01, 0b00),
        (sigma_x(), 0b00, 0b01),
        (minus_i_sigma_y, 0b11, 0b10),
        (minus_sigma_z, 0b10, 0b11),
    ];
    let mut u = ComplexMatrix::zeros(8, 8);
    for (op, out_bath, in_bath) in &blocks {
        for a in 0..2 {
            for b in 0..2 {
                u[(a * 4 + out_bath, b * 4 + in_bath)] = op[(a, b)];
            }
        }
    }
    u
}

/// A scrambling unitary together with its adjoint.
#[derive(Clone, Debug)]
pub enum Scrambler {
    /// Spin-bath evolution `exp(−iHt)` for the stored time.
    SpinBath { model: SpinBathModel, time: f64 },
    Circuit(LayeredCircuit),
    NoHiding,
    Explicit(ComplexMatrix),
}

impl Scrambler {
    pub fn explicit(u: ComplexMatrix) -> Result<Self> {
        if !u.is_square() || crate::linalg::qubits_for_dim(u.rows()).is_none() {
            return Err(Error::DimensionMismatch("explicit unitary must be 2^n x 2^n".into()));
        }
        let err = u.unitarity_error();
        if err > 1e-10 {
            return Err(Error::NotUnitary(err));
        }
        Ok(Scrambler::Explicit(u))
    }

    pub fn n_qubits(&self) -> usize {
        match self {
            Scrambler::SpinBath { model, .. } => model.n_qubits(),
            Scrambler::Circuit(c) => c.n_qubits(),
            Scrambler::NoHiding => 3,
            Scrambler::Explicit(u) => u.rows().trailing_zeros() as usize,
        }
    }

    pub fn unitary(&self) -> Result<ComplexMatrix> {
        match self {
            Scrambler::SpinBath { model, time } => spin_bath_unitary(model, *time),
            Scrambler::Circuit(c) => circuit_unitary(c),
            Scrambler::NoHiding => Ok(nohiding_unitary()),
            Scrambler::Explicit(u) => Ok(u.clone()),
        }
    }

    pub fn adjoint_unitary(&self) -> Result<ComplexMatrix> {
        match self {
            Scrambler::SpinBath { model, time } => spin_bath_unitary(model, -*time),
            other => Ok(other.unitary()?.adjoint()),
        }
    }
}
