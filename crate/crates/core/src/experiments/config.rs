use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::protocol::{BathState, BobMeasurement};
use crate::rng::named_stream;
use crate::scramblers::{sample_spin_bath, Pairing, SpinBathModel};
use crate::state::{BlochAxis, DensityMatrix};

fn z_axis() -> BlochAxis {
    BlochAxis::Z
}

fn x_axis() -> BlochAxis {
    BlochAxis::X
}

fn one() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

/// `count` evenly spaced points from `start` to `stop` inclusive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn points(&self) -> Result<Vec<f64>> {
        if self.count == 0 || !self.start.is_finite() || !self.stop.is_finite() {
            return Err(Error::InvalidArgument(format!("bad grid {self:?}")));
        }
        if self.count == 1 {
            return Ok(vec![self.start]);
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        Ok((0..self.count)
            .map(|k| if k + 1 == self.count { self.stop } else { self.start + k as f64 * step })
            .collect())
    }
}

/// Couplings drawn from `N(0, j_std²)` with the run's seed, or given
/// explicitly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinBathSpec {
    pub n_bath: usize,
    #[serde(default = "one")]
    pub j_std: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub couplings: Option<Vec<[f64; 3]>>,
}

impl SpinBathSpec {
    pub fn model(&self, seed: u64) -> Result<SpinBathModel> {
        match &self.couplings {
            Some(c) => {
                if c.len() != self.n_bath {
                    return Err(Error::InvalidArgument(format!("{} couplings for n_bath = {}", c.len(), self.n_bath)));
                }
                SpinBathModel::from_couplings(self.j_std, c.clone())
            }
            None => sample_spin_bath(self.n_bath, self.j_std, &mut named_stream(seed, "couplings")),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum BobSpec {
    Axis(BlochAxis),
    /// Axes drawn uniformly from the sphere with the run's seed.
    RandomAxes(usize),
    #[default]
    /// One random axis.
    Random,
    None,
    PauliSet { include_identity: bool },
}

impl BobSpec {
    pub fn measurement(&self, seed: u64) -> Result<BobMeasurement> {
        let mut rng = named_stream(seed, "bob");
        Ok(match self {
            BobSpec::Axis(a) => BobMeasurement::axis(*a),
            BobSpec::Random => BobMeasurement::axis(BlochAxis::random(&mut rng)),
            BobSpec::RandomAxes(k) => BobMeasurement::uniform_sphere(*k, &mut rng)?,
            BobSpec::None => BobMeasurement::none(),
            BobSpec::PauliSet { include_identity } => BobMeasurement::pauli_set(*include_identity),
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum BathSpec {
    #[default]
    MaximallyMixed,
    Product(Vec<BlochAxis>),
    /// Product of axes drawn with the run's seed.
    RandomProduct,
    Density(ComplexMatrix),
}

impl BathSpec {
    pub fn state(&self, n_bath: usize, seed: u64) -> Result<BathState> {
        Ok(match self {
            BathSpec::MaximallyMixed => BathState::MaximallyMixed,
            BathSpec::Product(axes) => BathState::Product(axes.clone()),
            BathSpec::RandomProduct => {
                let mut rng = named_stream(seed, "bath");
                BathState::Product((0..n_bath).map(|_| BlochAxis::random(&mut rng)).collect())
            }
            BathSpec::Density(m) => BathState::Explicit(DensityMatrix::new(m.clone())?),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimedSpinBath {
    pub n_bath: usize,
    #[serde(default = "one")]
    pub j_std: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub couplings: Option<Vec<[f64; 3]>>,
    pub time: f64,
}

impl TimedSpinBath {
    pub fn spec(&self) -> SpinBathSpec {
        SpinBathSpec { n_bath: self.n_bath, j_std: self.j_std, couplings: self.couplings.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum ScramblerSpec {
    SpinBath(TimedSpinBath),
    Circuit {
        n_qubits: usize,
        layers: usize,
        #[serde(default)]
        pairing: Pairing,
    },
    Haar {
        n_qubits: usize,
    },
    Nohiding,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EchoGridConfig {
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    pub spin_bath: SpinBathSpec,
    pub t1: GridSpec,
    pub t2: GridSpec,
    #[serde(default = "z_axis")]
    pub initial: BlochAxis,
    #[serde(default = "z_axis")]
    pub alice: BlochAxis,
    #[serde(default)]
    pub bob: BobSpec,
    #[serde(default)]
    pub bath: BathSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecoverConfig {
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    pub scrambler: ScramblerSpec,
    /// Stage durations for spin-bath scramblers; both default to the
    /// scrambler's time.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t2: Option<f64>,
    #[serde(default = "z_axis")]
    pub initial: BlochAxis,
    #[serde(default)]
    pub bob: BobSpec,
    #[serde(default)]
    pub bath: BathSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NohidingConfig {
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(default = "z_axis")]
    pub initial: BlochAxis,
    #[serde(default = "yes")]
    pub include_identity: bool,
    pub shots: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OtocSeriesConfig {
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    pub spin_bath: SpinBathSpec,
    pub times: GridSpec,
    #[serde(default = "x_axis")]
    pub r: BlochAxis,
    #[serde(default = "z_axis")]
    pub i: BlochAxis,
    #[serde(default = "z_axis")]
    pub f: BlochAxis,
    #[serde(default)]
    pub w_qubit: usize,
    #[serde(default)]
    pub v_qubit: usize,
    #[serde(default)]
    pub bath: BathSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HaarCheckConfig {
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    pub dims: Vec<usize>,
    pub samples: usize,
    #[serde(default = "x_axis")]
    pub r: BlochAxis,
    /// Pairs `(i, f)` to average.
    pub pairs: Vec<(BlochAxis, BlochAxis)>,
    pub moment_dims: Vec<usize>,
    pub moment_tuples: usize,
    pub moment_samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluctuationConfig {
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    pub qubits: Vec<usize>,
    pub layers: usize,
    pub samples: usize,
    #[serde(default)]
    pub pairing: Pairing,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassicalConfig {
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    pub n_bath: usize,
    #[serde(default = "one")]
    pub j_std: f64,
    pub t1: f64,
    pub dt: f64,
    /// Record `S^z` every this many steps.
    #[serde(default = "hundred")]
    pub stride: usize,
    pub ensemble: usize,
    /// Axis of the invasive measurement; random when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bob: Option<BlochAxis>,
}

fn hundred() -> usize {
    100
}

/// Serialized with a `kind` tag naming the experiment.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ExperimentConfig {
    EchoGrid(EchoGridConfig),
    EchoGridForward(EchoGridConfig),
    Recover(RecoverConfig),
    Nohiding(NohidingConfig),
    OtocSeries(OtocSeriesConfig),
    HaarCheck(HaarCheckConfig),
    FluctuationScaling(FluctuationConfig),
    ClassicalButterfly(ClassicalConfig),
}

macro_rules! each_variant {
    ($self:expr, $c:ident => $body:expr) => {
        match $self {
            ExperimentConfig::EchoGrid($c) | ExperimentConfig::EchoGridForward($c) => $body,
            ExperimentConfig::Recover($c) => $body,
            ExperimentConfig::Nohiding($c) => $body,
            ExperimentConfig::OtocSeries($c) => $body,
            ExperimentConfig::HaarCheck($c) => $body,
            ExperimentConfig::FluctuationScaling($c) => $body,
            ExperimentConfig::ClassicalButterfly($c) => $body,
        }
    };
}

impl ExperimentConfig {
    pub fn kind(&self) -> &'static str {
        match self {
            ExperimentConfig::EchoGrid(_) => "echo-grid",
            ExperimentConfig::EchoGridForward(_) => "echo-grid-forward",
            ExperimentConfig::Recover(_) => "recover",
            ExperimentConfig::Nohiding(_) => "nohiding",
            ExperimentConfig::OtocSeries(_) => "otoc-series",
            ExperimentConfig::HaarCheck(_) => "haar-check",
            ExperimentConfig::FluctuationScaling(_) => "fluctuation-scaling",
            ExperimentConfig::ClassicalButterfly(_) => "classical-butterfly",
        }
    }

    pub fn seed(&self) -> u64 {
        each_variant!(self, c => c.seed)
    }

    pub fn set_seed(&mut self, seed: u64) {
        each_variant!(self, c => c.seed = seed)
    }

    /// Output path prefix; defaults to the experiment kind in the working
    /// directory.
    pub fn output(&self) -> String {
        each_variant!(self, c => c.output.clone()).unwrap_or_else(|| self.kind().to_string())
    }

    pub fn set_output(&mut self, prefix: String) {
        each_variant!(self, c => c.output = Some(prefix))
    }

    pub const KINDS: [&'static str; 8] = [
        "echo-grid",
        "echo-grid-forward",
        "recover",
        "nohiding",
        "otoc-series",
        "haar-check",
        "fluctuation-scaling",
        "classical-butterfly",
    ];

    pub fn from_json(text: &str) -> Result<Self> {
        let config_err = |path: &str, message: String| Error::Config { path: path.into(), message };
        let mut value: serde_json::Value = serde_json::from_str(text).map_err(|e| config_err(".", e.to_string()))?;
        let obj = value
            .as_object_mut()
            .ok_or_else(|| config_err(".", "expected a JSON object".into()))?;
        let kind = match obj.remove("kind") {
            Some(serde_json::Value::String(k)) => k,
            Some(other) => return Err(config_err("kind", format!("expected a string, got {other}"))),
            None => return Err(config_err("kind", "missing field `kind`".into())),
        };
        // The tag is consumed here so each body is parsed with its own
        // unknown-field check and error paths.
        fn body<T: serde::de::DeserializeOwned>(value: serde_json::Value) -> Result<T> {
            serde_path_to_error::deserialize(value).map_err(|e| Error::Config {
                path: e.path().to_string(),
                message: e.inner().to_string(),
            })
        }
        Ok(match kind.as_str() {
            "echo-grid" => ExperimentConfig::EchoGrid(body(value)?),
            "echo-grid-forward" => ExperimentConfig::EchoGridForward(body(value)?),
            "recover" => ExperimentConfig::Recover(body(value)?),
            "nohiding" => ExperimentConfig::Nohiding(body(value)?),
            "otoc-series" => ExperimentConfig::OtocSeries(body(value)?),
            "haar-check" => ExperimentConfig::HaarCheck(body(value)?),
            "fluctuation-scaling" => ExperimentConfig::FluctuationScaling(body(value)?),
            "classical-butterfly" => ExperimentConfig::ClassicalButterfly(body(value)?),
            other => {
                return Err(config_err(
                    "kind",
                    format!("unknown experiment `{other}`, expected one of {}", Self::KINDS.join(", ")),
                ))
            }
        })
    }
}

/// Reads and parses a config file. Unknown keys are rejected and errors name
/// the offending field.
pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    ExperimentConfig::from_json(&text)
}
