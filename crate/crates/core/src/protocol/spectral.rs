//! Spin-bath protocol evaluated in the Hamiltonian eigenbasis.
//!
//! With `H = V Λ V†`, time evolution is a phase on each entry of a density
//! matrix written in the eigenbasis, so a full `(t₁, t₂)` sweep costs one
//! measurement product per `t₁` and only `O(N²)` work per `t₂`. The initial
//! state is carried as a factor `A` with `ρ̃₀ = A A†`, which halves the cost
//! of the measurement product for a maximally mixed bath and makes a pure
//! bath nearly free.

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, Spectrum, C64, ZERO};
use crate::scramblers::{spin_bath_spectrum, SpinBathModel};
use crate::state::{apply_single_qubit_rows, paulis, BlochAxis, DensityMatrix, Outcome, PureState};

use super::{BathState, BobSetting, Direction};

pub struct SpectralProtocol {
    n_qubits: usize,
    eigenvalues: Vec<f64>,
    vectors: ComplexMatrix,
    /// `V† (σ_k ⊗ I) V` for k = x, y, z.
    central_paulis: [ComplexMatrix; 3],
}

/// A density matrix in the eigenbasis, possibly unnormalized (a selective
/// measurement branch).
pub struct EigenbasisState(ComplexMatrix);

impl SpectralProtocol {
    pub fn new(model: &SpinBathModel) -> Result<Self> {
        Self::from_spectrum(spin_bath_spectrum(model)?)
    }

    pub fn from_spectrum(spectrum: Spectrum) -> Result<Self> {
        let dim = spectrum.dim();
        let n_qubits = crate::linalg::qubits_for_dim(dim)
            .filter(|&n| n >= 1)
            .ok_or_else(|| Error::DimensionMismatch(format!("spectrum of dimension {dim}")))?;
        let vectors = spectrum.eigenvectors;
        let central_paulis = paulis().map(|s| {
            let mut rotated = vectors.clone();
            apply_single_qubit_rows(&s, 0, n_qubits, &mut rotated);
            let mut o = vectors.adjoint_matmul(&rotated);
            o.symmetrize();
            o
        });
        Ok(SpectralProtocol { n_qubits, eigenvalues: spectrum.eigenvalues, vectors, central_paulis })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V† (σ_axis ⊗ I) V`.
    pub fn central_operator(&self, axis: &BlochAxis) -> ComplexMatrix {
        let [x, y, z] = axis.components();
        let [ox, oy, oz] = &self.central_paulis;
        let mut out = ox.scale_real(x);
        for (dst, (b, c)) in out.as_mut_slice().iter_mut().zip(oy.as_slice().iter().zip(oz.as_slice())) {
            *dst += b * y + c * z;
        }
        out
    }

    /// `A = V† (|i⟩ ⊗ C)` where `ρ_B = C C†`.
    pub fn initial_factor(&self, initial: &BlochAxis, bath: &BathState) -> Result<ComplexMatrix> {
        let n_bath = self.n_qubits - 1;
        let c = bath.factor(n_bath)?;
        let half = 1usize << n_bath;
        let psi = PureState::along(initial);
        let amps = psi.amplitudes();
        let r = c.cols();
        let mut full = ComplexMatrix::zeros(self.dim(), r);
        for row in 0..half {
            for col in 0..r {
                full[(row, col)] = amps[0] * c[(row, col)];
                full[(row + half, col)] = amps[1] * c[(row, col)];
            }
        }
        Ok(self.vectors.adjoint_matmul(&full))
    }

    fn phases(&self, t: f64, sign: f64) -> Vec<C64> {
        self.eigenvalues.iter().map(|&l| C64::from_polar(1.0, sign * l * t)).collect()
    }

    /// `D(t) A` with `D = exp(−iΛt)`.
    fn evolve_factor(&self, a: &ComplexMatrix, t: f64) -> ComplexMatrix {
        let phases = self.phases(t, -1.0);
        let mut g = a.clone();
        let cols = g.cols();
        for (row, p) in g.as_mut_slice().chunks_mut(cols.max(1)).zip(&phases) {
            for z in row {
                *z *= p;
            }
        }
        g
    }

    /// State after forward evolution for `t1` and Bob's non-selective
    /// measurement.
    pub fn measured(&self, a: &ComplexMatrix, t1: f64, setting: &BobSetting) -> EigenbasisState {
        let g = self.evolve_factor(a, t1);
        let mut rho = g.gram();
        if let BobSetting::Axis(axis) = setting {
            let flipped = self.central_operator(axis).matmul(&g).gram();
            for (dst, f) in rho.as_mut_slice().iter_mut().zip(flipped.as_slice()) {
                *dst = (*dst + f) * 0.5;
            }
        }
        EigenbasisState(rho)
    }

    /// Unnormalized branch `P ρ(t1) P` for one outcome of Bob's measurement.
    pub fn branch(&self, a: &ComplexMatrix, t1: f64, axis: &BlochAxis, outcome: Outcome) -> EigenbasisState {
        let g = self.evolve_factor(a, t1);
        let h = self.central_operator(axis).matmul(&g);
        let s = outcome.sign() * 0.5;
        let mut f = g;
        for (dst, hv) in f.as_mut_slice().iter_mut().zip(h.as_slice()) {
            *dst = *dst * 0.5 + hv * s;
        }
        EigenbasisState(f.gram())
    }

    /// Trace and `tr(σ_axis ⊗ I · ρ₂)` after the second stage of duration `t2`.
    pub fn moments_along(&self, state: &EigenbasisState, t2: f64, direction: Direction, axis: &BlochAxis) -> (f64, f64) {
        self.moments(state, t2, direction, &self.central_operator(axis))
    }

    /// Same as [`Self::moments_along`] with a prebuilt [`Self::central_operator`].
    pub fn moments(&self, state: &EigenbasisState, t2: f64, direction: Direction, op: &ComplexMatrix) -> (f64, f64) {
        let rho = &state.0;
        let n = self.dim();
        let sign = match direction {
            Direction::Reversed => 1.0,
            Direction::Forward => -1.0,
        };
        let p = self.phases(t2, sign);
        let mut trace = 0.0;
        let mut acc = 0.0;
        for a in 0..n {
            trace += rho[(a, a)].re;
            let rrow = rho.row(a);
            let orow = op.row(a);
            let mut row_acc = ZERO;
            for b in 0..n {
                row_acc += orow[b].conj() * rrow[b] * p[b].conj();
            }
            acc += (p[a] * row_acc).re;
        }
        (trace, acc)
    }

    /// Central-qubit state after the second stage. The input must be
    /// normalized (a non-selective state).
    pub fn central_state(&self, state: &EigenbasisState, t2: f64, direction: Direction) -> DensityMatrix {
        let mut v = [0.0; 3];
        for (k, slot) in v.iter_mut().enumerate() {
            let (trace, m) = self.moments(state, t2, direction, &self.central_paulis[k]);
            *slot = m / trace;
        }
        crate::state::tomography(v[0], v[1], v[2])
    }
}
