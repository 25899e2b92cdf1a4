//! Scramble, let Bob measure the central qubit, evolve again (backward for
//! the recovery protocol, forward for the ordinary echo), then read out the
//! central qubit.
//!
//! Expectation values written `⟨•⟩` use `tr(• · I ⊗ ρ_B)` with an
//! unnormalized identity on the central qubit, so `⟨I⟩ = 2`.

mod spectral;

pub use spectral::{EigenbasisState, SpectralProtocol};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, Spectrum, C64};
use crate::scramblers::{spin_bath_spectrum, Scrambler};
use crate::state::{
    self, embed, expectation, measure_nonselective, measure_selective, partial_trace, projector_along, BlochAxis,
    DensityMatrix, Outcome, PureState,
};

/// Initial state of the bath qubits.
#[derive(Clone, Debug, PartialEq)]
pub enum BathState {
    MaximallyMixed,
    /// Pure product state, one Bloch axis per bath qubit.
    Product(Vec<BlochAxis>),
    Explicit(DensityMatrix),
}

impl BathState {
    pub fn density(&self, n_bath: usize) -> Result<DensityMatrix> {
        let rho = match self {
            BathState::MaximallyMixed => DensityMatrix::maximally_mixed(n_bath),
            BathState::Product(axes) => PureState::product(axes)?.density(),
            BathState::Explicit(rho) => rho.clone(),
        };
        if rho.n_qubits() != n_bath {
            return Err(Error::DimensionMismatch(format!(
                "bath state on {} qubits, scrambler expects {n_bath}",
                rho.n_qubits()
            )));
        }
        Ok(rho)
    }

    /// `C` with `ρ_B = C C†`.
    pub(crate) fn factor(&self, n_bath: usize) -> Result<ComplexMatrix> {
        let dim = 1usize << n_bath;
        match self {
            BathState::MaximallyMixed => Ok(ComplexMatrix::identity(dim).scale_real(1.0 / (dim as f64).sqrt())),
            BathState::Product(_) => {
                let psi = PureState::product(match self {
                    BathState::Product(a) => a,
                    _ => unreachable!(),
                })?;
                if psi.n_qubits() != n_bath {
                    return Err(Error::DimensionMismatch(format!(
                        "bath state on {} qubits, scrambler expects {n_bath}",
                        psi.n_qubits()
                    )));
                }
                ComplexMatrix::from_vec(dim, 1, psi.amplitudes().to_vec())
            }
            BathState::Explicit(rho) => {
                let rho = self.density(n_bath).map(|_| rho)?;
                let mut m = rho.matrix().clone();
                m.symmetrize();
                let spec = crate::linalg::hermitian_eig(&crate::linalg::HermitianMatrix::new(m)?)?;
                let keep: Vec<usize> = (0..dim).filter(|&k| spec.eigenvalues[k] > 1e-14).collect();
                Ok(ComplexMatrix::from_fn(dim, keep.len(), |i, j| {
                    spec.eigenvectors[(i, keep[j])] * spec.eigenvalues[keep[j]].sqrt()
                }))
            }
        }
    }
}

/// One intermediate setting: no measurement at all, or a projective
/// measurement of the central qubit along an axis with the outcome discarded.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BobSetting {
    NoMeasurement,
    Axis(BlochAxis),
}

/// Bob's measurement settings, averaged uniformly.
#[derive(Clone, Debug, PartialEq)]
pub struct BobMeasurement(Vec<BobSetting>);

impl BobMeasurement {
    pub fn axis(axis: BlochAxis) -> Self {
        BobMeasurement(vec![BobSetting::Axis(axis)])
    }

    pub fn none() -> Self {
        BobMeasurement(vec![BobSetting::NoMeasurement])
    }

    pub fn list(settings: Vec<BobSetting>) -> Result<Self> {
        if settings.is_empty() {
            return Err(Error::InvalidArgument("Bob needs at least one setting".into()));
        }
        Ok(BobMeasurement(settings))
    }

    /// `count` axes drawn uniformly from the sphere.
    pub fn uniform_sphere<R: Rng + ?Sized>(count: usize, rng: &mut R) -> Result<Self> {
        Self::list((0..count).map(|_| BobSetting::Axis(BlochAxis::random(rng))).collect())
    }

    /// `{X, Y, Z}`, plus "no measurement" standing in for the identity.
    pub fn pauli_set(include_identity: bool) -> Self {
        let mut settings = Vec::with_capacity(4);
        if include_identity {
            settings.push(BobSetting::NoMeasurement);
        }
        settings.extend([BlochAxis::X, BlochAxis::Y, BlochAxis::Z].map(BobSetting::Axis));
        BobMeasurement(settings)
    }

    pub fn settings(&self) -> &[BobSetting] {
        &self.0
    }

    fn single_axis(&self) -> Result<BlochAxis> {
        match self.0.as_slice() {
            [BobSetting::Axis(a)] => Ok(*a),
            _ => Err(Error::InvalidArgument("joint probabilities need exactly one Bob axis".into())),
        }
    }
}

/// Direction of the second evolution stage.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// `U†(t₂)`: the recovery protocol.
    #[default]
    Reversed,
    /// `U(t₂)`: the ordinary forward-forward echo.
    Forward,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StageTimes {
    pub t1: f64,
    pub t2: f64,
}

/// Everything needed for one run of the protocol.
#[derive(Clone, Debug)]
pub struct ProtocolConfig {
    pub scrambler: Scrambler,
    /// Spin-bath scramblers only; defaults to the scrambler's own time for
    /// both stages.
    pub times: Option<StageTimes>,
    pub direction: Direction,
    pub initial: BlochAxis,
    pub bob: BobMeasurement,
    pub alice: BlochAxis,
    pub bath: BathState,
    pub shots: Option<u64>,
}

impl ProtocolConfig {
    /// Central qubit up, Bob and Alice along z, maximally mixed bath,
    /// reversed second stage.
    pub fn new(scrambler: Scrambler) -> Self {
        ProtocolConfig {
            scrambler,
            times: None,
            direction: Direction::Reversed,
            initial: BlochAxis::Z,
            bob: BobMeasurement::axis(BlochAxis::Z),
            alice: BlochAxis::Z,
            bath: BathState::MaximallyMixed,
            shots: None,
        }
    }

    pub fn with_times(mut self, t1: f64, t2: f64) -> Self {
        self.times = Some(StageTimes { t1, t2 });
        self
    }

    pub fn with_direction(mut self, direction: Direction) -> Self {
        self.direction = direction;
        self
    }

    pub fn with_initial(mut self, axis: BlochAxis) -> Self {
        self.initial = axis;
        self
    }

    pub fn with_bob(mut self, bob: BobMeasurement) -> Self {
        self.bob = bob;
        self
    }

    pub fn with_alice(mut self, axis: BlochAxis) -> Self {
        self.alice = axis;
        self
    }

    pub fn with_bath(mut self, bath: BathState) -> Self {
        self.bath = bath;
        self
    }

    pub fn with_shots(mut self, shots: u64) -> Self {
        self.shots = Some(shots);
        self
    }

    pub fn n_qubits(&self) -> usize {
        self.scrambler.n_qubits()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_qubits();
        if n < 1 {
            return Err(Error::InvalidArgument("scrambler acts on no qubits".into()));
        }
        self.bath.density(n - 1)?;
        match (&self.scrambler, self.times) {
            (Scrambler::SpinBath { .. }, Some(StageTimes { t1, t2 })) => {
                if !(t1 >= 0.0 && t2 >= 0.0 && t1.is_finite() && t2.is_finite()) {
                    return Err(Error::InvalidArgument(format!("stage times must be finite and >= 0, got ({t1}, {t2})")));
                }
            }
            (Scrambler::SpinBath { time, .. }, None) if !(time.is_finite() && *time >= 0.0) => {
                return Err(Error::InvalidArgument(format!("scrambling time must be finite and >= 0, got {time}")));
            }
            (Scrambler::SpinBath { .. }, None) => {}
            (_, Some(_)) => {
                return Err(Error::InvalidArgument("stage times apply to spin-bath scramblers only".into()));
            }
            (_, None) => {}
        }
        if matches!(self.shots, Some(0)) {
            return Err(Error::InvalidArgument("shots must be at least 1".into()));
        }
        Ok(())
    }

    fn stage_times(&self) -> Option<(f64, f64)> {
        match (&self.scrambler, self.times) {
            (Scrambler::SpinBath { .. }, Some(t)) => Some((t.t1, t.t2)),
            (Scrambler::SpinBath { time, .. }, None) => Some((*time, *time)),
            _ => None,
        }
    }

    fn initial_density(&self) -> Result<DensityMatrix> {
        let bath = self.bath.density(self.n_qubits() - 1)?;
        PureState::along(&self.initial).density().tensor(&bath)
    }
}

/// Dense first-stage unitary and second-stage unitary.
struct Stages {
    forward: ComplexMatrix,
    second: ComplexMatrix,
}

impl Stages {
    fn build(cfg: &ProtocolConfig, spectrum: Option<&Spectrum>) -> Result<Self> {
        cfg.validate()?;
        if let Some((t1, t2)) = cfg.stage_times() {
            let owned;
            let spec = match spectrum {
                Some(s) => s,
                None => {
                    let Scrambler::SpinBath { model, .. } = &cfg.scrambler else { unreachable!() };
                    owned = spin_bath_spectrum(model)?;
                    &owned
                }
            };
            let second = match cfg.direction {
                Direction::Reversed => spec.propagator(-t2),
                Direction::Forward => spec.propagator(t2),
            };
            return Ok(Stages { forward: spec.propagator(t1), second });
        }
        let forward = cfg.scrambler.unitary()?;
        let second = match cfg.direction {
            Direction::Reversed => forward.adjoint(),
            Direction::Forward => forward.clone(),
        };
        Ok(Stages { forward, second })
    }
}

fn central(op: &ComplexMatrix, n: usize) -> Result<ComplexMatrix> {
    embed(op, 0, n)
}

/// `tr(op · I ⊗ ρ_B)`.
pub fn correlator_average(op: &ComplexMatrix, bath: &DensityMatrix) -> Result<C64> {
    let dim = 2 * bath.dim();
    if op.rows() != dim || op.cols() != dim {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} operator against a {}-qubit bath",
            op.rows(),
            op.cols(),
            bath.n_qubits()
        )));
    }
    let weight = crate::linalg::kron(&ComplexMatrix::identity(2), bath.matrix())?;
    Ok(op.trace_of_product(&weight))
}

/// `⟨P_r(t₁) P_f(t₁−t₂) P_r(t₁) P_i⟩` from Heisenberg-picture operators.
pub fn joint_probability_heisenberg(cfg: &ProtocolConfig) -> Result<f64> {
    let r = cfg.bob.single_axis()?;
    let stages = Stages::build(cfg, None)?;
    let n = cfg.n_qubits();
    let pr = central(&projector_along(&r, Outcome::Plus), n)?;
    let pf = central(&projector_along(&cfg.alice, Outcome::Plus), n)?;
    let pi = central(&projector_along(&cfg.initial, Outcome::Plus), n)?;
    let u1 = &stages.forward;
    // P_r(t₁) = U₁† P_r U₁
    let pr_t = u1.adjoint_matmul(&pr.matmul(u1));
    // P_f seen from t = 0 through both stages: (W U₁)† P_f (W U₁)
    let wu = stages.second.matmul(u1);
    let pf_t = wu.adjoint_matmul(&pf.matmul(&wu));
    let op = pr_t.matmul(&pf_t).matmul(&pr_t).matmul(&pi);
    let bath = cfg.bath.density(n - 1)?;
    let v = correlator_average(&op, &bath)?;
    if v.im.abs() > 1e-8 {
        return Err(Error::NumericalConsistency(v.im.abs()));
    }
    Ok(v.re)
}

/// `Prob(P_f | P_r) · Prob(P_r)` by evolving the density matrix.
pub fn joint_probability_channel(cfg: &ProtocolConfig) -> Result<f64> {
    let r = cfg.bob.single_axis()?;
    let stages = Stages::build(cfg, None)?;
    let rho1 = cfg.initial_density()?.evolve(&stages.forward)?;
    joint_from_evolved(cfg, &stages, &rho1, &r, Outcome::Plus)
}

fn joint_from_evolved(
    cfg: &ProtocolConfig,
    stages: &Stages,
    rho1: &DensityMatrix,
    r: &BlochAxis,
    outcome: Outcome,
) -> Result<f64> {
    let n = cfg.n_qubits();
    let pr = central(&projector_along(r, outcome), n)?;
    let (prob_r, post) = match measure_selective(rho1, &pr) {
        Ok(v) => v,
        Err(Error::DegenerateBranch(_)) => return Ok(0.0),
        Err(e) => return Err(e),
    };
    let rho2 = post.evolve(&stages.second)?;
    let pf = central(&projector_along(&cfg.alice, Outcome::Plus), n)?;
    Ok(expectation(&rho2, &pf)? * prob_r)
}

/// `Prob(P_f)`: the sum of both of Bob's outcomes, averaged over his
/// settings.
pub fn final_probability(cfg: &ProtocolConfig) -> Result<f64> {
    cfg.validate()?;
    if let Scrambler::SpinBath { model, .. } = &cfg.scrambler {
        let engine = SpectralProtocol::new(model)?;
        return final_probability_with(&engine, cfg);
    }
    let stages = Stages::build(cfg, None)?;
    let rho1 = cfg.initial_density()?.evolve(&stages.forward)?;
    let n = cfg.n_qubits();
    let pf = central(&projector_along(&cfg.alice, Outcome::Plus), n)?;
    let mut total = 0.0;
    for setting in cfg.bob.settings() {
        total += match setting {
            BobSetting::NoMeasurement => expectation(&rho1.evolve(&stages.second)?, &pf)?,
            BobSetting::Axis(r) => {
                joint_from_evolved(cfg, &stages, &rho1, r, Outcome::Plus)?
                    + joint_from_evolved(cfg, &stages, &rho1, r, Outcome::Minus)?
            }
        };
    }
    Ok(total / cfg.bob.settings().len() as f64)
}

/// [`final_probability`] for a spin-bath config on a prepared engine.
pub fn final_probability_with(engine: &SpectralProtocol, cfg: &ProtocolConfig) -> Result<f64> {
    cfg.validate()?;
    let (t1, t2) = cfg
        .stage_times()
        .ok_or_else(|| Error::InvalidArgument("spectral evaluation needs a spin-bath scrambler".into()))?;
    check_engine(engine, cfg)?;
    let a = engine.initial_factor(&cfg.initial, &cfg.bath)?;
    let mut total = 0.0;
    for setting in cfg.bob.settings() {
        let state = engine.measured(&a, t1, setting);
        let (trace, m) = engine.moments_along(&state, t2, cfg.direction, &cfg.alice);
        total += 0.5 * (trace + m);
    }
    Ok(total / cfg.bob.settings().len() as f64)
}

/// Joint probabilities `Prob(P_f, P_r)` and `Prob(P_f, I − P_r)` on a
/// prepared engine.
pub fn joint_probabilities_with(engine: &SpectralProtocol, cfg: &ProtocolConfig) -> Result<(f64, f64)> {
    cfg.validate()?;
    let (t1, t2) = cfg
        .stage_times()
        .ok_or_else(|| Error::InvalidArgument("spectral evaluation needs a spin-bath scrambler".into()))?;
    check_engine(engine, cfg)?;
    let r = cfg.bob.single_axis()?;
    let a = engine.initial_factor(&cfg.initial, &cfg.bath)?;
    let joint = |outcome| {
        let state = engine.branch(&a, t1, &r, outcome);
        let (trace, m) = engine.moments_along(&state, t2, cfg.direction, &cfg.alice);
        0.5 * (trace + m)
    };
    Ok((joint(Outcome::Plus), joint(Outcome::Minus)))
}

fn check_engine(engine: &SpectralProtocol, cfg: &ProtocolConfig) -> Result<()> {
    if engine.n_qubits() != cfg.n_qubits() {
        return Err(Error::DimensionMismatch(format!(
            "engine on {} qubits, config on {}",
            engine.n_qubits(),
            cfg.n_qubits()
        )));
    }
    Ok(())
}

/// Outcome of one recovery run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecoveryResult {
    /// Central-qubit state at the end of the protocol.
    #[serde(serialize_with = "serialize_density")]
    pub final_state: DensityMatrix,
    /// Initial state inferred from the final one.
    #[serde(serialize_with = "serialize_density")]
    pub reconstructed: DensityMatrix,
    /// `⟨i|ρ_reconstructed|i⟩` against the true initial state.
    pub fidelity: f64,
    /// Probability of the `+1` outcome along x, y and z in the final state.
    pub axis_probabilities: [f64; 3],
}

fn serialize_density<S: serde::Serializer>(rho: &DensityMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    rho.matrix().serialize(s)
}

impl RecoveryResult {
    pub fn from_final_state(final_state: DensityMatrix, initial: &BlochAxis) -> Result<Self> {
        let v = final_state.bloch_vector()?;
        let reconstructed = reconstruct_initial(&final_state)?;
        let fidelity = state::fidelity(&reconstructed, &PureState::along(initial))?;
        Ok(RecoveryResult {
            final_state,
            reconstructed,
            fidelity,
            axis_probabilities: v.map(|c| (0.5 * (1.0 + c)).clamp(0.0, 1.0)),
        })
    }
}

/// Inverts `ρ_f = I/4 + ρ_i/2`, i.e. `ρ_i = 2ρ_f − I/2`, clamped to the
/// Bloch ball.
pub fn reconstruct_initial(final_state: &DensityMatrix) -> Result<DensityMatrix> {
    let v = final_state.bloch_vector()?;
    Ok(state::tomography(2.0 * v[0], 2.0 * v[1], 2.0 * v[2]))
}

/// Central-qubit state at the end of the protocol, averaged over Bob's
/// settings.
pub fn final_central_state(cfg: &ProtocolConfig) -> Result<DensityMatrix> {
    cfg.validate()?;
    if let Scrambler::SpinBath { model, .. } = &cfg.scrambler {
        let engine = SpectralProtocol::new(model)?;
        return final_central_state_with(&engine, cfg);
    }
    let stages = Stages::build(cfg, None)?;
    let n = cfg.n_qubits();
    let rho1 = cfg.initial_density()?.evolve(&stages.forward)?;
    let mut acc = ComplexMatrix::zeros(2, 2);
    for setting in cfg.bob.settings() {
        let measured = match setting {
            BobSetting::NoMeasurement => rho1.clone(),
            BobSetting::Axis(r) => measure_nonselective(&rho1, &central(&projector_along(r, Outcome::Plus), n)?)?,
        };
        let reduced = partial_trace(&measured.evolve(&stages.second)?, &[0])?;
        acc = &acc + reduced.matrix();
    }
    let mut avg = acc.scale_real(1.0 / cfg.bob.settings().len() as f64);
    avg.symmetrize();
    Ok(DensityMatrix::from_matrix_unchecked(avg))
}

pub fn final_central_state_with(engine: &SpectralProtocol, cfg: &ProtocolConfig) -> Result<DensityMatrix> {
    cfg.validate()?;
    let (t1, t2) = cfg
        .stage_times()
        .ok_or_else(|| Error::InvalidArgument("spectral evaluation needs a spin-bath scrambler".into()))?;
    check_engine(engine, cfg)?;
    let a = engine.initial_factor(&cfg.initial, &cfg.bath)?;
    let mut v = [0.0; 3];
    for setting in cfg.bob.settings() {
        let state = engine.measured(&a, t1, setting);
        let b = engine.central_state(&state, t2, cfg.direction).bloch_vector()?;
        for (acc, c) in v.iter_mut().zip(b) {
            *acc += c;
        }
    }
    let k = cfg.bob.settings().len() as f64;
    Ok(state::tomography(v[0] / k, v[1] / k, v[2] / k))
}

/// Applies the scrambler, Bob's non-selective measurement and the second
/// stage, then infers the initial central state from the final one.
pub fn run_protocol_density(cfg: &ProtocolConfig) -> Result<RecoveryResult> {
    RecoveryResult::from_final_state(final_central_state(cfg)?, &cfg.initial)
}

pub fn run_protocol_density_with(engine: &SpectralProtocol, cfg: &ProtocolConfig) -> Result<RecoveryResult> {
    RecoveryResult::from_final_state(final_central_state_with(engine, cfg)?, &cfg.initial)
}

/// Same as [`run_protocol_density`], but the final state is estimated from
/// `cfg.shots` simulated measurements per Pauli axis.
pub fn recover_with_tomography<R: Rng + ?Sized>(cfg: &ProtocolConfig, rng: &mut R) -> Result<RecoveryResult> {
    let exact = final_central_state(cfg)?;
    tomography_from_state(&exact, cfg, rng)
}

pub fn tomography_from_state<R: Rng + ?Sized>(exact: &DensityMatrix, cfg: &ProtocolConfig, rng: &mut R) -> Result<RecoveryResult> {
    let shots = cfg
        .shots
        .ok_or_else(|| Error::InvalidArgument("tomography needs a shot count".into()))?;
    let [ex, ey, ez] = state::sample_expectations(exact, shots, rng)?;
    RecoveryResult::from_final_state(state::tomography(ex, ey, ez), &cfg.initial)
}

/// `final_probability` averaged over Bob measuring along X, Y, Z and, when
/// `include_identity`, not measuring at all.
pub fn pauli_set_averaged_probability(cfg: &ProtocolConfig, include_identity: bool) -> Result<f64> {
    let cfg = cfg.clone().with_bob(BobMeasurement::pauli_set(include_identity));
    final_probability(&cfg)
}

/// Final probabilities over a `(t₁, t₂)` grid, row-major in `t1`.
#[derive(Clone, Debug, PartialEq)]
pub struct EchoGrid {
    pub t1: Vec<f64>,
    pub t2: Vec<f64>,
    pub prob: Vec<Vec<f64>>,
}

impl EchoGrid {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.prob[i][j]
    }
}

/// Sweeps `final_probability` over `t1s × t2s` for a spin-bath config.
/// Rows are independent and run on the current rayon pool.
pub fn echo_grid(cfg: &ProtocolConfig, t1s: &[f64], t2s: &[f64], direction: Direction) -> Result<EchoGrid> {
    let Scrambler::SpinBath { model, .. } = &cfg.scrambler else {
        return Err(Error::InvalidArgument("echo grids need a spin-bath scrambler".into()));
    };
    let engine = SpectralProtocol::new(model)?;
    let grids = echo_grids_with(&engine, cfg, t1s, t2s, &[direction])?;
    Ok(grids.into_iter().next().expect("one direction requested"))
}

/// Grids for several second-stage directions sharing the same measurement
/// products.
pub fn echo_grids_with(
    engine: &SpectralProtocol,
    cfg: &ProtocolConfig,
    t1s: &[f64],
    t2s: &[f64],
    directions: &[Direction],
) -> Result<Vec<EchoGrid>> {
    if t1s.iter().chain(t2s).any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::InvalidArgument("grid times must be finite and >= 0".into()));
    }
    let probe = cfg.clone().with_times(0.0, 0.0);
    probe.validate()?;
    check_engine(engine, &probe)?;
    let a = engine.initial_factor(&cfg.initial, &cfg.bath)?;
    let settings = cfg.bob.settings();
    let k = settings.len() as f64;
    let alice = engine.central_operator(&cfg.alice);
    let rows: Vec<Vec<Vec<f64>>> = t1s
        .par_iter()
        .map(|&t1| {
            let mut out = vec![vec![0.0; t2s.len()]; directions.len()];
            for setting in settings {
                let state = engine.measured(&a, t1, setting);
                for (d, &direction) in directions.iter().enumerate() {
                    for (j, &t2) in t2s.iter().enumerate() {
                        let (trace, m) = engine.moments(&state, t2, direction, &alice);
                        out[d][j] += 0.5 * (trace + m) / k;
                    }
                }
            }
            out
        })
        .collect();
    Ok((0..directions.len())
        .map(|d| EchoGrid {
            t1: t1s.to_vec(),
            t2: t2s.to_vec(),
            prob: rows.iter().map(|r| r[d].iter().map(|p| p.clamp(0.0, 1.0)).collect()).collect(),
        })
        .collect())
}
