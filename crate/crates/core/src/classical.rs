//! Classical unit-vector spins with the same couplings as the quantum bath:
//! `H = Σ_i Σ_α J_i^α S^α s_i^α`, pure precession, reversed by flipping the
//! sign of every coupling.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::stream;
use crate::scramblers::SpinBathModel;
use crate::state::BlochAxis;

pub type Vec3 = [f64; 3];

fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn normalize(a: Vec3) -> Vec3 {
    let n = dot(a, a).sqrt();
    [a[0] / n, a[1] / n, a[2] / n]
}

fn axpy(a: f64, x: Vec3, y: Vec3) -> Vec3 {
    [y[0] + a * x[0], y[1] + a * x[1], y[2] + a * x[2]]
}

const NORM_TOL: f64 = 1e-9;
const MAX_STEPS: f64 = 1e9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassicalSpinState {
    pub central: Vec3,
    pub bath: Vec<Vec3>,
}

impl ClassicalSpinState {
    pub fn new(central: Vec3, bath: Vec<Vec3>) -> Result<Self> {
        for v in std::iter::once(&central).chain(&bath) {
            if !v.iter().all(|c| c.is_finite()) || (dot(*v, *v).sqrt() - 1.0).abs() > NORM_TOL {
                return Err(Error::InvalidState(format!("spin {v:?} is not a unit vector")));
            }
        }
        Ok(ClassicalSpinState { central, bath })
    }

    /// Central spin along +z, bath spins uniform on the sphere.
    pub fn random_bath<R: Rng + ?Sized>(n_bath: usize, rng: &mut R) -> Self {
        let bath = (0..n_bath).map(|_| BlochAxis::random(rng).components()).collect();
        ClassicalSpinState { central: [0.0, 0.0, 1.0], bath }
    }

    fn renormalize(&mut self) {
        self.central = normalize(self.central);
        for s in &mut self.bath {
            *s = normalize(*s);
        }
    }

    fn combine(&self, h: f64, k: &ClassicalSpinState) -> ClassicalSpinState {
        ClassicalSpinState {
            central: axpy(h, k.central, self.central),
            bath: self.bath.iter().zip(&k.bath).map(|(s, d)| axpy(h, *d, *s)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalModel {
    couplings: Vec<[f64; 3]>,
    sign: f64,
}

impl ClassicalModel {
    pub fn new(couplings: Vec<[f64; 3]>) -> Result<Self> {
        if couplings.iter().flatten().any(|j| !j.is_finite()) {
            return Err(Error::InvalidArgument("couplings must be finite".into()));
        }
        Ok(ClassicalModel { couplings, sign: 1.0 })
    }

    pub fn from_spin_bath(model: &SpinBathModel) -> Self {
        ClassicalModel { couplings: model.couplings().to_vec(), sign: 1.0 }
    }

    pub fn n_bath(&self) -> usize {
        self.couplings.len()
    }

    pub fn sign(&self) -> f64 {
        self.sign
    }

    /// Same couplings with every sign flipped, which runs the dynamics backward.
    pub fn reversed(&self) -> Self {
        ClassicalModel { couplings: self.couplings.clone(), sign: -self.sign }
    }
}

/// `dS/dt = S × B_S` with `B_S^α = Σ_i J_i^α s_i^α` and `ds_i/dt = s_i × b_i`
/// with `b_i^α = J_i^α S^α`, all times the model's sign.
pub fn derivative(state: &ClassicalSpinState, model: &ClassicalModel) -> ClassicalSpinState {
    let sg = model.sign;
    let mut field = [0.0; 3];
    let bath = state
        .bath
        .iter()
        .zip(&model.couplings)
        .map(|(s, j)| {
            for a in 0..3 {
                field[a] += j[a] * s[a];
            }
            let b = [j[0] * state.central[0], j[1] * state.central[1], j[2] * state.central[2]];
            cross(*s, b).map(|c| sg * c)
        })
        .collect();
    ClassicalSpinState { central: cross(state.central, field).map(|c| sg * c), bath }
}

/// `Σ_i Σ_α J_i^α S^α s_i^α` (for the unflipped model).
pub fn energy(state: &ClassicalSpinState, model: &ClassicalModel) -> f64 {
    state
        .bath
        .iter()
        .zip(&model.couplings)
        .map(|(s, j)| (0..3).map(|a| j[a] * state.central[a] * s[a]).sum::<f64>())
        .sum()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub central_z: Vec<f64>,
    pub final_state: ClassicalSpinState,
}

impl Trajectory {
    pub fn final_central_z(&self) -> f64 {
        self.final_state.central[2]
    }
}

fn rk4_step(state: &ClassicalSpinState, model: &ClassicalModel, h: f64) -> ClassicalSpinState {
    let k1 = derivative(state, model);
    let k2 = derivative(&state.combine(0.5 * h, &k1), model);
    let k3 = derivative(&state.combine(0.5 * h, &k2), model);
    let k4 = derivative(&state.combine(h, &k3), model);
    let mut next = state.clone();
    let w = h / 6.0;
    next.central = [0, 1, 2].map(|a| state.central[a] + w * (k1.central[a] + 2.0 * k2.central[a] + 2.0 * k3.central[a] + k4.central[a]));
    for (i, s) in next.bath.iter_mut().enumerate() {
        *s = [0, 1, 2].map(|a| {
            state.bath[i][a] + w * (k1.bath[i][a] + 2.0 * k2.bath[i][a] + 2.0 * k3.bath[i][a] + k4.bath[i][a])
        });
    }
    next.renormalize();
    next
}

fn step_count(duration: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    if !(duration >= 0.0 && duration.is_finite()) {
        return Err(Error::InvalidArgument(format!("duration must be finite and >= 0, got {duration}")));
    }
    let n = (duration / dt).round();
    if n > MAX_STEPS {
        return Err(Error::InvalidArgument(format!("{n} integration steps exceed the limit of {MAX_STEPS}")));
    }
    Ok(if duration > 0.0 { (n as usize).max(1) } else { 0 })
}

/// Fixed-step RK4 with every spin renormalized after each step. The step is
/// adjusted slightly so that a whole number of steps covers `duration`.
/// `central_z` is recorded every `stride` steps and at the end.
pub fn integrate(state: &ClassicalSpinState, model: &ClassicalModel, duration: f64, dt: f64, stride: usize) -> Result<Trajectory> {
    integrate_from(state, model, duration, dt, stride, 0.0)
}

fn integrate_from(
    state: &ClassicalSpinState,
    model: &ClassicalModel,
    duration: f64,
    dt: f64,
    stride: usize,
    t0: f64,
) -> Result<Trajectory> {
    if state.bath.len() != model.n_bath() {
        return Err(Error::DimensionMismatch(format!(
            "{} bath spins, {} couplings",
            state.bath.len(),
            model.n_bath()
        )));
    }
    let stride = stride.max(1);
    let n = step_count(duration, dt)?;
    let h = if n == 0 { 0.0 } else { duration / n as f64 };
    let mut times = vec![t0];
    let mut central_z = vec![state.central[2]];
    let mut cur = state.clone();
    for k in 1..=n {
        cur = rk4_step(&cur, model, h);
        if k % stride == 0 || k == n {
            times.push(t0 + k as f64 * h);
            central_z.push(cur.central[2]);
        }
    }
    Ok(Trajectory { times, central_z, final_state: cur })
}

/// Resets the spin to `+axis` with probability `cos²(θ/2) = (1 + s·a)/2`,
/// otherwise to `−axis`.
pub fn invasive_measure<R: Rng + ?Sized>(spin: Vec3, axis: &BlochAxis, rng: &mut R) -> Vec3 {
    let a = axis.components();
    let p_plus = (0.5 * (1.0 + dot(spin, a))).clamp(0.0, 1.0);
    if rng.random::<f64>() < p_plus {
        a
    } else {
        axis.flipped().components()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassicalProtocol {
    pub t1: f64,
    pub dt: f64,
    /// Axis of the invasive measurement at `t1`, or none.
    pub measure: Option<BlochAxis>,
    pub stride: usize,
}

/// Central spin up, bath spins random, forward for `t1`, optional invasive
/// measurement of the central spin, then the sign-flipped dynamics for `t1`.
pub fn run_classical_protocol<R: Rng + ?Sized>(model: &ClassicalModel, protocol: &ClassicalProtocol, rng: &mut R) -> Result<Trajectory> {
    let start = ClassicalSpinState::random_bath(model.n_bath(), rng);
    run_from(&start, model, protocol, rng)
}

pub fn run_from<R: Rng + ?Sized>(
    start: &ClassicalSpinState,
    model: &ClassicalModel,
    protocol: &ClassicalProtocol,
    rng: &mut R,
) -> Result<Trajectory> {
    let ClassicalProtocol { t1, dt, measure, stride } = *protocol;
    let forward = integrate(start, model, t1, dt, stride)?;
    let mut mid = forward.final_state.clone();
    if let Some(axis) = measure {
        mid.central = invasive_measure(mid.central, &axis, rng);
    }
    let back = integrate_from(&mid, &model.reversed(), t1, dt, stride, t1)?;
    let mut times = forward.times;
    let mut central_z = forward.central_z;
    // the measurement shows up as a jump at t1
    times.extend_from_slice(&back.times);
    central_z.extend_from_slice(&back.central_z);
    if measure.is_none() {
        times.remove(times.len() - back.times.len());
        central_z.remove(central_z.len() - back.central_z.len());
    }
    Ok(Trajectory { times, central_z, final_state: back.final_state })
}

/// `S^z(2t₁)` for `runs` independent bath draws. Run `k` uses stream `k` of
/// `master`.
pub fn butterfly_ensemble(model: &ClassicalModel, protocol: &ClassicalProtocol, runs: usize, master: u64) -> Result<Vec<f64>> {
    let quiet = ClassicalProtocol { stride: usize::MAX, ..*protocol };
    (0..runs)
        .into_par_iter()
        .map(|k| run_classical_protocol(model, &quiet, &mut stream(master, k as u64)).map(|t| t.final_central_z()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn two_spin(jz: f64) -> ClassicalModel {
        ClassicalModel::new(vec![[0.0, 0.0, jz]]).unwrap()
    }

    #[test]
    fn zero_couplings_do_nothing() {
        let model = ClassicalModel::new(vec![[0.0; 3]; 3]).unwrap();
        let state = ClassicalSpinState::random_bath(3, &mut stream(1, 0));
        let d = derivative(&state, &model);
        assert_eq!(d.central, [0.0; 3]);
        assert!(d.bath.iter().all(|v| *v == [0.0; 3]));
    }

    #[test]
    fn derivative_is_tangent() {
        let model = ClassicalModel::new(vec![[0.3, -1.2, 0.7], [0.5, 0.1, -0.4]]).unwrap();
        let mut state = ClassicalSpinState::random_bath(2, &mut stream(2, 0));
        state.central = BlochAxis::normalized(0.2, 0.5, -0.3).unwrap().components();
        let d = derivative(&state, &model);
        assert!(dot(d.central, state.central).abs() < 1e-12);
        for (s, ds) in state.bath.iter().zip(&d.bath) {
            assert!(dot(*s, *ds).abs() < 1e-12);
        }
    }

    #[test]
    fn two_spin_precession_matches_closed_form() {
        // With J^z only, S rotates about z at rate J^z s^z and s^z stays fixed.
        let jz = 1.3;
        let theta: f64 = 0.9;
        let bath = BlochAxis::normalized(0.4, 0.0, 0.8).unwrap().components();
        let start = ClassicalSpinState::new([theta.sin(), 0.0, theta.cos()], vec![bath]).unwrap();
        let t = 2.5;
        let traj = integrate(&start, &two_spin(jz), t, 1e-3, 100).unwrap();
        let omega = jz * bath[2];
        let phi = -omega * t;
        let expected = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
        for (got, want) in traj.final_state.central.iter().zip(expected) {
            assert!((got - want).abs() < 1e-6);
        }
    }

    #[test]
    fn zero_duration_returns_start() {
        let state = ClassicalSpinState::random_bath(2, &mut stream(3, 0));
        let model = ClassicalModel::new(vec![[1.0; 3]; 2]).unwrap();
        let traj = integrate(&state, &model, 0.0, 1e-3, 1).unwrap();
        assert_eq!(traj.final_state, state);
        assert_eq!(traj.times, vec![0.0]);
    }

    #[test]
    fn invasive_measurement_extremes() {
        let mut rng = stream(4, 0);
        let axis = BlochAxis::normalized(1.0, 1.0, 0.0).unwrap();
        for _ in 0..100 {
            assert_eq!(invasive_measure(axis.components(), &axis, &mut rng), axis.components());
            assert_eq!(invasive_measure(axis.flipped().components(), &axis, &mut rng), axis.flipped().components());
        }
    }

    #[test]
    fn measurement_at_zero_time_along_z_is_harmless() {
        let model = ClassicalModel::new(vec![[0.5, -0.3, 1.0]; 4]).unwrap();
        let p = ClassicalProtocol { t1: 0.0, dt: 1e-3, measure: Some(BlochAxis::Z), stride: 1 };
        let t = run_classical_protocol(&model, &p, &mut stream(5, 0)).unwrap();
        assert_eq!(t.final_central_z(), 1.0);
    }

    #[test]
    fn guards() {
        let model = two_spin(1.0);
        let state = ClassicalSpinState::random_bath(1, &mut stream(6, 0));
        assert!(integrate(&state, &model, 1.0, 0.0, 1).is_err());
        assert!(integrate(&state, &model, 1e6, 1e-6, 1).is_err());
        assert!(ClassicalSpinState::new([1.0, 1.0, 0.0], vec![]).is_err());
    }
}
