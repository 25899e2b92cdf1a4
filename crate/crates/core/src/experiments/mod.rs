//! Config-driven experiment runs that write CSV/JSON outputs and a manifest.

mod config;

pub use config::*;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::classical::{butterfly_ensemble, run_from, ClassicalModel, ClassicalProtocol, ClassicalSpinState};
use crate::error::{Error, Result};
use crate::linalg::haar_unitary;
use crate::otoc::{
    fluctuation_scaling, haar_average_analytic, haar_average_mc, haar_fourth_moment_check, otoc_time_series,
    random_index_tuple, FourthMoment, HaarEstimate, OtocSpec,
};
use crate::protocol::{
    echo_grid, final_central_state, pauli_set_averaged_probability, run_protocol_density, tomography_from_state,
    BathState, BobMeasurement, Direction, EchoGrid, ProtocolConfig, RecoveryResult,
};
use crate::rng::named_stream;
use crate::scramblers::{build_random_circuit_with, sample_spin_bath, Scrambler};
use crate::state::BlochAxis;

pub const TOOL: &str = env!("CARGO_PKG_NAME");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutputRecord {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub kind: String,
    pub config: ExperimentConfig,
    pub duration_seconds: f64,
    pub outputs: Vec<OutputRecord>,
}

/// Collects output files under one path prefix.
struct Outputs {
    prefix: String,
    written: Vec<OutputRecord>,
}

impl Outputs {
    fn new(prefix: String) -> Result<Self> {
        if let Some(parent) = Path::new(&prefix).parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent)?;
        }
        Ok(Outputs { prefix, written: Vec::new() })
    }

    fn path(&self, suffix: &str) -> PathBuf {
        PathBuf::from(format!("{}{suffix}", self.prefix))
    }

    fn write(&mut self, suffix: &str, bytes: &[u8]) -> Result<()> {
        let path = self.path(suffix);
        write_atomic(&path, bytes)?;
        self.written.push(OutputRecord {
            path: path.display().to_string(),
            sha256: hex::encode(Sha256::digest(bytes)),
        });
        Ok(())
    }

    fn json<T: Serialize>(&mut self, suffix: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(suffix, text.as_bytes())
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// CSV text with a header row. Numbers use the shortest decimal that
/// round-trips.
struct Csv(String);

impl Csv {
    fn new(header: &str) -> Self {
        Csv(format!("{header}\n"))
    }

    fn row(&mut self, fields: &[&dyn std::fmt::Display]) {
        for (k, f) in fields.iter().enumerate() {
            if k > 0 {
                self.0.push(',');
            }
            write!(self.0, "{f}").expect("writing to a String");
        }
        self.0.push('\n');
    }
}

pub fn echo_grid_csv(grid: &EchoGrid) -> String {
    let mut csv = Csv::new("t1,t2,prob");
    for (i, t1) in grid.t1.iter().enumerate() {
        for (j, t2) in grid.t2.iter().enumerate() {
            csv.row(&[t1, t2, &grid.at(i, j)]);
        }
    }
    csv.0
}

const AXIS_NAMES: [&str; 3] = ["x", "y", "z"];

fn axis_csv(probs: [f64; 3]) -> String {
    let mut csv = Csv::new("axis,prob_plus");
    for (name, p) in AXIS_NAMES.iter().zip(probs) {
        csv.row(&[name, &p]);
    }
    csv.0
}

/// Runs one experiment on the current rayon pool and writes its outputs and
/// manifest.
pub fn run(config: &ExperimentConfig) -> Result<RunManifest> {
    let start = Instant::now();
    let mut out = Outputs::new(config.output())?;
    let seed = config.seed();
    match config {
        ExperimentConfig::EchoGrid(c) => run_echo(c, Direction::Reversed, seed, &mut out)?,
        ExperimentConfig::EchoGridForward(c) => run_echo(c, Direction::Forward, seed, &mut out)?,
        ExperimentConfig::Recover(c) => run_recover(c, seed, &mut out)?,
        ExperimentConfig::Nohiding(c) => run_nohiding(c, seed, &mut out)?,
        ExperimentConfig::OtocSeries(c) => run_otoc(c, seed, &mut out)?,
        ExperimentConfig::HaarCheck(c) => run_haar(c, seed, &mut out)?,
        ExperimentConfig::FluctuationScaling(c) => run_fluctuation(c, seed, &mut out)?,
        ExperimentConfig::ClassicalButterfly(c) => run_classical(c, seed, &mut out)?,
    }
    let manifest = RunManifest {
        tool: TOOL.into(),
        version: VERSION.into(),
        kind: config.kind().into(),
        config: config.clone(),
        duration_seconds: start.elapsed().as_secs_f64(),
        outputs: out.written.clone(),
    };
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    write_atomic(&out.path("_manifest.json"), text.as_bytes())?;
    Ok(manifest)
}

/// [`run`] on a dedicated pool of `workers` threads.
pub fn run_with_workers(config: &ExperimentConfig, workers: Option<usize>) -> Result<RunManifest> {
    match workers {
        None => run(config),
        Some(0) => Err(Error::InvalidArgument("workers must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?
            .install(|| run(config)),
    }
}

fn run_echo(c: &EchoGridConfig, direction: Direction, seed: u64, out: &mut Outputs) -> Result<()> {
    let model = c.spin_bath.model(seed)?;
    let bath = c.bath.state(model.n_bath(), seed)?;
    let cfg = ProtocolConfig::new(Scrambler::SpinBath { model, time: 0.0 })
        .with_initial(c.initial)
        .with_alice(c.alice)
        .with_bob(c.bob.measurement(seed)?)
        .with_bath(bath);
    let grid = echo_grid(&cfg, &c.t1.points()?, &c.t2.points()?, direction)?;
    out.write(".csv", echo_grid_csv(&grid).as_bytes())
}

fn build_scrambler(spec: &ScramblerSpec, seed: u64) -> Result<Scrambler> {
    Ok(match spec {
        ScramblerSpec::SpinBath(s) => Scrambler::SpinBath { model: s.spec().model(seed)?, time: s.time },
        ScramblerSpec::Circuit { n_qubits, layers, pairing } => Scrambler::Circuit(build_random_circuit_with(
            *n_qubits,
            *layers,
            *pairing,
            &mut named_stream(seed, "circuit"),
        )?),
        ScramblerSpec::Haar { n_qubits } => {
            crate::linalg::check_dim_guard(1usize << n_qubits)?;
            Scrambler::explicit(haar_unitary(1 << n_qubits, &mut named_stream(seed, "haar")))?
        }
        ScramblerSpec::Nohiding => Scrambler::NoHiding,
    })
}

#[derive(Serialize)]
struct RecoveryRecord<'a> {
    #[serde(flatten)]
    result: &'a RecoveryResult,
    shots: Option<u64>,
}

fn run_recover(c: &RecoverConfig, seed: u64, out: &mut Outputs) -> Result<()> {
    let scrambler = build_scrambler(&c.scrambler, seed)?;
    let n_bath = scrambler.n_qubits().saturating_sub(1);
    let mut cfg = ProtocolConfig::new(scrambler)
        .with_initial(c.initial)
        .with_bob(c.bob.measurement(seed)?)
        .with_bath(c.bath.state(n_bath, seed)?);
    if c.t1.is_some() || c.t2.is_some() {
        let ScramblerSpec::SpinBath(s) = &c.scrambler else {
            return Err(Error::InvalidArgument("t1/t2 apply to spin-bath scramblers only".into()));
        };
        cfg = cfg.with_times(c.t1.unwrap_or(s.time), c.t2.unwrap_or(s.time));
    }
    let result = match c.shots {
        None => run_protocol_density(&cfg)?,
        Some(shots) => {
            let cfg = cfg.with_shots(shots);
            tomography_from_state(&final_central_state(&cfg)?, &cfg, &mut named_stream(seed, "shots"))?
        }
    };
    out.write(".csv", axis_csv(result.axis_probabilities).as_bytes())?;
    out.json(".json", &RecoveryRecord { result: &result, shots: c.shots })
}

#[derive(Serialize)]
struct NohidingRecord {
    include_identity: bool,
    exact_probabilities: [f64; 3],
    shots: u64,
    tomography: RecoveryResult,
}

fn run_nohiding(c: &NohidingConfig, seed: u64, out: &mut Outputs) -> Result<()> {
    let base = ProtocolConfig::new(Scrambler::NoHiding)
        .with_initial(c.initial)
        .with_bath(BathState::Product(vec![BlochAxis::X, BlochAxis::X]))
        .with_shots(c.shots);
    let mut probs = [0.0; 3];
    for (p, axis) in probs.iter_mut().zip([BlochAxis::X, BlochAxis::Y, BlochAxis::Z]) {
        *p = pauli_set_averaged_probability(&base.clone().with_alice(axis), c.include_identity)?;
    }
    let averaged = base.clone().with_bob(BobMeasurement::pauli_set(c.include_identity));
    let tomography = tomography_from_state(&final_central_state(&averaged)?, &averaged, &mut named_stream(seed, "shots"))?;
    out.write(".csv", axis_csv(probs).as_bytes())?;
    out.json(".json", &NohidingRecord { include_identity: c.include_identity, exact_probabilities: probs, shots: c.shots, tomography })
}

fn run_otoc(c: &OtocSeriesConfig, seed: u64, out: &mut Outputs) -> Result<()> {
    let model = c.spin_bath.model(seed)?;
    let spec = OtocSpec {
        r: c.r,
        i: c.i,
        f: c.f,
        w_qubit: c.w_qubit,
        v_qubit: c.v_qubit,
        bath: c.bath.state(model.n_bath(), seed)?,
    };
    let times = c.times.points()?;
    let values = otoc_time_series(&model, &spec, &times)?;
    let mut csv = Csv::new("t,otoc");
    for (t, v) in times.iter().zip(&values) {
        csv.row(&[t, v]);
    }
    out.write(".csv", csv.0.as_bytes())
}

#[derive(Serialize)]
struct HaarRecord {
    dim: usize,
    i: BlochAxis,
    f: BlochAxis,
    analytic: f64,
    estimate: HaarEstimate,
    within_3_sigma: bool,
}

#[derive(Serialize)]
struct MomentRecord {
    dim: usize,
    indices: [usize; 8],
    #[serde(flatten)]
    moment: FourthMoment,
    within_3_sigma: bool,
}

#[derive(Serialize)]
struct HaarCheckRecord {
    averages: Vec<HaarRecord>,
    moments: Vec<MomentRecord>,
}

fn run_haar(c: &HaarCheckConfig, seed: u64, out: &mut Outputs) -> Result<()> {
    let mut averages = Vec::new();
    for &dim in &c.dims {
        for (k, (i, f)) in c.pairs.iter().enumerate() {
            let spec = OtocSpec::central(c.r, *i, *f);
            let analytic = haar_average_analytic(&spec, dim)?;
            let estimate = haar_average_mc(&spec, dim, c.samples, &mut named_stream(seed, &format!("haar-{dim}-{k}")))?;
            let within_3_sigma = (estimate.mean - analytic).abs() <= 3.0 * estimate.std_error;
            averages.push(HaarRecord { dim, i: *i, f: *f, analytic, estimate, within_3_sigma });
        }
    }
    let mut moments = Vec::new();
    for &dim in &c.moment_dims {
        let mut tuples = named_stream(seed, &format!("tuples-{dim}"));
        for k in 0..c.moment_tuples {
            let indices = random_index_tuple(dim, &mut tuples);
            let moment =
                haar_fourth_moment_check(dim, indices, c.moment_samples, &mut named_stream(seed, &format!("moment-{dim}-{k}")))?;
            moments.push(MomentRecord { dim, indices, moment, within_3_sigma: moment.within(3.0) });
        }
    }
    out.json(".json", &HaarCheckRecord { averages, moments })
}

#[derive(Serialize)]
struct FitRecord {
    slope: f64,
    intercept: f64,
    layers: usize,
}

fn run_fluctuation(c: &FluctuationConfig, seed: u64, out: &mut Outputs) -> Result<()> {
    let (fit, runs) = fluctuation_scaling(&c.qubits, c.layers, c.samples, c.pairing, seed)?;
    let mut csv = Csv::new("n_q,variance,samples");
    for r in &fit.records {
        csv.row(&[&r.n_q, &r.variance, &r.samples]);
    }
    out.write(".csv", csv.0.as_bytes())?;
    for (n_q, runs) in &runs {
        let mut csv = Csv::new("run_index,axis,prob");
        for run in runs {
            for (name, p) in AXIS_NAMES.iter().zip(run.probs) {
                csv.row(&[&run.run_index, name, &p]);
            }
        }
        out.write(&format!("_runs_nq{n_q}.csv"), csv.0.as_bytes())?;
    }
    out.json("_fit.json", &FitRecord { slope: fit.slope, intercept: fit.intercept, layers: c.layers })
}

#[derive(Serialize)]
struct EnsembleRecord {
    runs: usize,
    bob: BlochAxis,
    mean_abs_deviation_measured: f64,
    max_abs_deviation_unmeasured: f64,
    final_central_z_measured: Vec<f64>,
}

fn run_classical(c: &ClassicalConfig, seed: u64, out: &mut Outputs) -> Result<()> {
    let model = ClassicalModel::from_spin_bath(&sample_spin_bath(c.n_bath, c.j_std, &mut named_stream(seed, "couplings"))?);
    let bob = c.bob.unwrap_or_else(|| BlochAxis::random(&mut named_stream(seed, "bob")));
    let quiet = ClassicalProtocol { t1: c.t1, dt: c.dt, measure: None, stride: c.stride };
    let measured = ClassicalProtocol { measure: Some(bob), ..quiet };
    let start = ClassicalSpinState::random_bath(c.n_bath, &mut named_stream(seed, "bath"));

    for (suffix, protocol) in [("_unmeasured.csv", &quiet), ("_measured.csv", &measured)] {
        let traj = run_from(&start, &model, protocol, &mut named_stream(seed, "measure"))?;
        let mut csv = Csv::new("t,central_z");
        for (t, z) in traj.times.iter().zip(&traj.central_z) {
            csv.row(&[t, z]);
        }
        out.write(suffix, csv.0.as_bytes())?;
    }

    let finals = butterfly_ensemble(&model, &measured, c.ensemble, seed)?;
    let unmeasured = butterfly_ensemble(&model, &quiet, c.ensemble, seed)?;
    let n = finals.len().max(1) as f64;
    out.json(
        "_ensemble.json",
        &EnsembleRecord {
            runs: c.ensemble,
            bob,
            mean_abs_deviation_measured: finals.iter().map(|z| (z - 1.0).abs()).sum::<f64>() / n,
            max_abs_deviation_unmeasured: unmeasured.iter().map(|z| (z - 1.0).abs()).fold(0.0, f64::max),
            final_central_z_measured: finals,
        },
    )
}
