//! Out-of-time-ordered correlators `F(t) = ⟨σ_r(t) σ_i σ_r(t) σ_f⟩`, their
//! Haar averages, and the sample-to-sample spread of the recovery
//! probability for random circuits.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{haar_unitary, kron, qubits_for_dim, ComplexMatrix, C64, ZERO};
use crate::protocol::{correlator_average, BathState};
use crate::rng::stream;
use crate::scramblers::{build_random_circuit_with, spin_bath_spectrum, Pairing, SpinBathModel};
use crate::state::{
    apply_single_qubit_rows, embed, pauli_along, reduce_to_first_qubit, BlochAxis, DensityMatrix,
};

/// `σ_r` is the scrambled operator W on `w_qubit`; `σ_i` and `σ_f` are the
/// static pair V on `v_qubit`.
#[derive(Clone, Debug, PartialEq)]
pub struct OtocSpec {
    pub r: BlochAxis,
    pub i: BlochAxis,
    pub f: BlochAxis,
    pub w_qubit: usize,
    pub v_qubit: usize,
    pub bath: BathState,
}

impl OtocSpec {
    /// Everything on the central qubit, maximally mixed bath.
    pub fn central(r: BlochAxis, i: BlochAxis, f: BlochAxis) -> Self {
        OtocSpec { r, i, f, w_qubit: 0, v_qubit: 0, bath: BathState::MaximallyMixed }
    }

    fn check(&self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::InvalidArgument("OTOC needs at least one qubit".into()));
        }
        for q in [self.w_qubit, self.v_qubit] {
            if q >= n {
                return Err(Error::QubitIndex { index: q, n_qubits: n });
            }
        }
        self.bath.density(n - 1).map(|_| ())
    }

    /// With `σ_i = ±σ_f` and a maximally mixed bath the correlator is real
    /// by cyclicity of the trace. Otherwise it is complex in general.
    fn must_be_real(&self) -> bool {
        self.i.dot(&self.f).abs() == 1.0 && self.bath == BathState::MaximallyMixed
    }

    fn operators(&self, n: usize) -> Result<[ComplexMatrix; 3]> {
        Ok([
            embed(&pauli_along(&self.r), self.w_qubit, n)?,
            embed(&pauli_along(&self.i), self.v_qubit, n)?,
            embed(&pauli_along(&self.f), self.v_qubit, n)?,
        ])
    }
}

fn real_part(v: C64) -> Result<f64> {
    if v.im.abs() > 1e-8 {
        return Err(Error::NumericalConsistency(v.im.abs()));
    }
    Ok(v.re)
}

/// Real part of `tr(U†σ_rU σ_i U†σ_rU σ_f · I ⊗ ρ_B)`. When the value must
/// be real, an imaginary residual above 1e-8 is an error.
pub fn otoc_value(u: &ComplexMatrix, spec: &OtocSpec) -> Result<f64> {
    let v = otoc_complex(u, spec)?;
    if spec.must_be_real() {
        real_part(v)
    } else {
        Ok(v.re)
    }
}

pub fn otoc_complex(u: &ComplexMatrix, spec: &OtocSpec) -> Result<C64> {
    let n = qubits_for_dim(u.rows())
        .filter(|_| u.is_square())
        .ok_or_else(|| Error::DimensionMismatch(format!("{}x{} is not a qubit unitary", u.rows(), u.cols())))?;
    spec.check(n)?;
    let [w, vi, vf] = spec.operators(n)?;
    let bath = spec.bath.density(n - 1)?;
    otoc_dense(u, &w, &vi, &vf, &bath)
}

fn otoc_dense(u: &ComplexMatrix, w: &ComplexMatrix, vi: &ComplexMatrix, vf: &ComplexMatrix, bath: &DensityMatrix) -> Result<C64> {
    let wt = u.adjoint_matmul(&w.matmul(u));
    let op = wt.matmul(vi).matmul(&wt).matmul(vf);
    correlator_average(&op, bath)
}

/// `F(t)` under `U(t) = exp(−iHt)` for each time. Works in the eigenbasis of
/// `H`, so each time point costs two matrix products.
pub fn otoc_time_series(model: &SpinBathModel, spec: &OtocSpec, times: &[f64]) -> Result<Vec<f64>> {
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::InvalidArgument("OTOC times must be finite and >= 0".into()));
    }
    let n = model.n_qubits();
    spec.check(n)?;
    let spectrum = spin_bath_spectrum(model)?;
    let v = &spectrum.eigenvectors;
    let rotate = |op: &ComplexMatrix, q: usize, rhs: &ComplexMatrix| {
        let mut m = rhs.clone();
        apply_single_qubit_rows(op, q, n, &mut m);
        v.adjoint_matmul(&m)
    };
    let w = rotate(&pauli_along(&spec.r), spec.w_qubit, v);
    let vi = rotate(&pauli_along(&spec.i), spec.v_qubit, v);
    let weighted = match &spec.bath {
        BathState::MaximallyMixed => v.scale_real(1.0 / (1usize << (n - 1)) as f64),
        bath => kron(&ComplexMatrix::identity(2), bath.density(n - 1)?.matrix())?.matmul(v),
    };
    // V† σ_f (I ⊗ ρ_B) V
    let vf = rotate(&pauli_along(&spec.f), spec.v_qubit, &weighted);
    let lambda = &spectrum.eigenvalues;
    let dim = lambda.len();

    times
        .iter()
        .map(|&t| {
            let phase: Vec<C64> = lambda.iter().map(|&l| C64::from_polar(1.0, l * t)).collect();
            let wt = ComplexMatrix::from_fn(dim, dim, |a, b| w[(a, b)] * phase[a] * phase[b].conj());
            let x = wt.matmul(&vi);
            let y = wt.matmul(&vf);
            let mut acc = ZERO;
            for a in 0..dim {
                let xr = x.row(a);
                for (b, xv) in xr.iter().enumerate() {
                    acc += xv * y[(b, a)];
                }
            }
            if spec.must_be_real() {
                real_part(acc)
            } else {
                Ok(acc.re)
            }
        })
        .collect()
}

/// Haar average of [`otoc_value`]: `−⟨σ_iσ_f⟩ / (dim² − 1)` (real part).
///
/// Summing the fourth-moment identity, the `δδ/(N²−1)` terms carry
/// `tr(σ_r)² = 0`, so only the crossed `−δδ/(N(N²−1))` term with
/// `tr(σ_r²) = N` survives, hence the minus sign.
pub fn haar_average_analytic(spec: &OtocSpec, dim: usize) -> Result<f64> {
    let n = qubits_for_dim(dim)
        .filter(|&n| n >= 1)
        .ok_or_else(|| Error::InvalidArgument(format!("dimension {dim} is not 2^n with n >= 1")))?;
    spec.check(n)?;
    // Re⟨σ_iσ_f⟩ = 2 i·f; the i (i×f)·σ part of σ_iσ_f is imaginary.
    let d = dim as f64;
    Ok(-2.0 * spec.i.dot(&spec.f) / (d * d - 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HaarEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Neumaier-compensated sum, so the result does not depend on how partial
/// results were produced.
pub(crate) fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}

fn mean_and_std_error(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = compensated_sum(values.iter().copied()) / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss = compensated_sum(values.iter().map(|v| (v - mean) * (v - mean)));
    (mean, (ss / (n - 1.0)).sqrt() / n.sqrt())
}

/// Monte Carlo average of [`otoc_value`] over Haar-random unitaries. Each
/// sample draws from its own stream derived from one value taken from `rng`.
pub fn haar_average_mc<R: Rng + ?Sized>(spec: &OtocSpec, dim: usize, samples: usize, rng: &mut R) -> Result<HaarEstimate> {
    if samples < 100 {
        return Err(Error::InvalidArgument(format!("need at least 100 samples, got {samples}")));
    }
    let n = qubits_for_dim(dim)
        .filter(|&n| n >= 1)
        .ok_or_else(|| Error::InvalidArgument(format!("dimension {dim} is not 2^n with n >= 1")))?;
    spec.check(n)?;
    let [w, vi, vf] = spec.operators(n)?;
    let bath = spec.bath.density(n - 1)?;
    let master: u64 = rng.random();
    let values = (0..samples)
        .into_par_iter()
        .map(|k| {
            let u = haar_unitary(dim, &mut stream(master, k as u64));
            let v = otoc_dense(&u, &w, &vi, &vf, &bath)?;
            if spec.must_be_real() {
                real_part(v)
            } else {
                Ok(v.re)
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    let (mean, std_error) = mean_and_std_error(&values);
    Ok(HaarEstimate { mean, std_error, samples })
}

/// Monte Carlo and Weingarten values of
/// `E[U_{m₁n₁} U*_{m₁'n₁'} U_{m₂n₂} U*_{m₂'n₂'}]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FourthMoment {
    /// Real and imaginary parts of the sample mean.
    pub mc: [f64; 2],
    pub std_error: [f64; 2],
    pub analytic: f64,
}

impl FourthMoment {
    /// Whether both parts lie within `k` standard errors of the analytic value.
    pub fn within(&self, k: f64) -> bool {
        (self.mc[0] - self.analytic).abs() <= k * self.std_error[0] && self.mc[1].abs() <= k * self.std_error[1]
    }
}

/// Indices in the order `(m₁, n₁, m₁', n₁', m₂, n₂, m₂', n₂')`.
pub fn weingarten_fourth_moment(dim: usize, idx: [usize; 8]) -> f64 {
    let [m1, n1, m1p, n1p, m2, n2, m2p, n2p] = idx;
    let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let n = dim as f64;
    let direct = d(m1, m1p) * d(m2, m2p);
    let crossed = d(m1, m2p) * d(m2, m1p);
    let n_direct = d(n1, n1p) * d(n2, n2p);
    let n_crossed = d(n1, n2p) * d(n2, n1p);
    (direct * n_direct + crossed * n_crossed) / (n * n - 1.0) - (direct * n_crossed + crossed * n_direct) / (n * (n * n - 1.0))
}

pub fn haar_fourth_moment_check<R: Rng + ?Sized>(dim: usize, idx: [usize; 8], samples: usize, rng: &mut R) -> Result<FourthMoment> {
    if dim < 2 {
        return Err(Error::InvalidArgument(format!("dimension {dim} < 2")));
    }
    if let Some(&bad) = idx.iter().find(|&&k| k >= dim) {
        return Err(Error::InvalidArgument(format!("index {bad} out of range for dimension {dim}")));
    }
    if samples < 2 {
        return Err(Error::InvalidArgument("need at least 2 samples".into()));
    }
    let [m1, n1, m1p, n1p, m2, n2, m2p, n2p] = idx;
    let master: u64 = rng.random();
    let values: Vec<C64> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let u = haar_unitary(dim, &mut stream(master, k as u64));
            u[(m1, n1)] * u[(m1p, n1p)].conj() * u[(m2, n2)] * u[(m2p, n2p)].conj()
        })
        .collect();
    let (re, re_err) = mean_and_std_error(&values.iter().map(|z| z.re).collect::<Vec<_>>());
    let (im, im_err) = mean_and_std_error(&values.iter().map(|z| z.im).collect::<Vec<_>>());
    Ok(FourthMoment { mc: [re, im], std_error: [re_err, im_err], analytic: weingarten_fourth_moment(dim, idx) })
}

/// Index tuple for the moment check. Half the time the primed indices copy
/// one of the two delta patterns so that the expected value is nonzero.
pub fn random_index_tuple<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> [usize; 8] {
    let mut pick = || rng.random_range(0..dim);
    let (m1, n1, m2, n2) = (pick(), pick(), pick(), pick());
    let mut idx = [m1, n1, pick(), pick(), m2, n2, pick(), pick()];
    match rng.random_range(0..4) {
        0 => {
            idx[2] = m1;
            idx[6] = m2;
            idx[3] = n1;
            idx[7] = n2;
        }
        1 => {
            idx[2] = m2;
            idx[6] = m1;
            idx[3] = n2;
            idx[7] = n1;
        }
        _ => {}
    }
    idx
}

/// Probabilities of `+1` along x, y and z for one sampled circuit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FluctuationRun {
    pub run_index: usize,
    pub probs: [f64; 3],
}

/// One circuit sample: start in `|0…0⟩`, apply a fresh random circuit, let
/// Bob measure qubit 0 along a random axis without recording the outcome,
/// undo the circuit and read out qubit 0.
fn fluctuation_sample(n_qubits: usize, layers: usize, pairing: Pairing, rng: &mut impl Rng) -> Result<[f64; 3]> {
    let circuit = build_random_circuit_with(n_qubits, layers, pairing, rng)?;
    let bob = BlochAxis::random(rng);
    let dim = 1usize << n_qubits;
    let mut psi = vec![ZERO; dim];
    psi[0] = C64::new(1.0, 0.0);
    circuit.apply(&mut psi);

    // (1 ± r·σ)/2 on qubit 0
    let [rx, ry, rz] = bob.components();
    let off = C64::new(rx, -ry);
    let half = dim / 2;
    let mut rho = [[ZERO; 2]; 2];
    for s in [1.0, -1.0] {
        let mut branch = vec![ZERO; dim];
        for k in 0..half {
            let (a, b) = (psi[k], psi[k + half]);
            branch[k] = 0.5 * ((1.0 + s * rz) * a + s * off * b);
            branch[k + half] = 0.5 * (s * off.conj() * a + (1.0 - s * rz) * b);
        }
        circuit.apply_adjoint(&mut branch);
        let r = reduce_to_first_qubit(&branch);
        for (dst, src) in rho.iter_mut().zip(r) {
            for (d, v) in dst.iter_mut().zip(src) {
                *d += v;
            }
        }
    }
    let ex = 2.0 * rho[0][1].re;
    let ey = -2.0 * rho[0][1].im;
    let ez = (rho[0][0] - rho[1][1]).re;
    Ok([ex, ey, ez].map(|e| (0.5 * (1.0 + e)).clamp(0.0, 1.0)))
}

fn sample_index(n_qubits: usize, run: usize) -> u64 {
    ((n_qubits as u64) << 40) | run as u64
}

/// `samples` independent circuit runs at `n_qubits`. Run `k` uses stream
/// `(n_qubits << 40) | k` of `master`, so results do not depend on scheduling.
pub fn fluctuation_runs(n_qubits: usize, layers: usize, samples: usize, pairing: Pairing, master: u64) -> Result<Vec<FluctuationRun>> {
    if n_qubits < 2 {
        return Err(Error::InvalidArgument("fluctuation runs need at least 2 qubits".into()));
    }
    crate::linalg::check_dim_guard(1usize << n_qubits)?;
    (0..samples)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream(master, sample_index(n_qubits, k));
            fluctuation_sample(n_qubits, layers, pairing, &mut rng).map(|probs| FluctuationRun { run_index: k, probs })
        })
        .collect()
}

/// `mean(p²) − mean(p)²`.
pub fn population_variance(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = compensated_sum(values.iter().copied()) / n;
    let mean_sq = compensated_sum(values.iter().map(|v| v * v)) / n;
    (mean_sq - mean * mean).max(0.0)
}

/// `C` for the z readout across circuit samples.
pub fn fluctuation_variance(n_qubits: usize, layers: usize, samples: usize, master: u64) -> Result<f64> {
    if samples < 30 {
        return Err(Error::InvalidArgument(format!("need at least 30 samples, got {samples}")));
    }
    let runs = fluctuation_runs(n_qubits, layers, samples, Pairing::BrickWall, master)?;
    Ok(population_variance(&runs.iter().map(|r| r.probs[2]).collect::<Vec<_>>()))
}

/// Bootstrap standard error of [`population_variance`].
pub fn bootstrap_std_error<R: Rng + ?Sized>(values: &[f64], resamples: usize, rng: &mut R) -> Result<f64> {
    if values.len() < 2 || resamples < 2 {
        return Err(Error::InvalidArgument("bootstrap needs at least 2 values and 2 resamples".into()));
    }
    let n = values.len();
    let mut buf = vec![0.0; n];
    let estimates: Vec<f64> = (0..resamples)
        .map(|_| {
            for slot in buf.iter_mut() {
                *slot = values[rng.random_range(0..n)];
            }
            population_variance(&buf)
        })
        .collect();
    let (_, se) = mean_and_std_error(&estimates);
    Ok(se * (resamples as f64).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VarianceRecord {
    pub n_q: usize,
    pub variance: f64,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VarianceScaling {
    pub records: Vec<VarianceRecord>,
    /// Least-squares slope of `ln C` against `n_q`.
    pub slope: f64,
    pub intercept: f64,
}

/// Least-squares fit of `ln C = slope · n_q + intercept`.
pub fn scaling_fit(records: &[VarianceRecord]) -> Result<VarianceScaling> {
    if records.len() < 3 {
        return Err(Error::InvalidArgument(format!("scaling fit needs at least 3 points, got {}", records.len())));
    }
    if let Some(r) = records.iter().find(|r| !(r.variance > 0.0 && r.variance.is_finite())) {
        return Err(Error::InvalidArgument(format!("variance {} at n_q = {} has no logarithm", r.variance, r.n_q)));
    }
    let n = records.len() as f64;
    let xs: Vec<f64> = records.iter().map(|r| r.n_q as f64).collect();
    let ys: Vec<f64> = records.iter().map(|r| r.variance.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("scaling fit needs distinct qubit counts".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok(VarianceScaling { records: records.to_vec(), slope, intercept: my - slope * mx })
}

/// Per-run probabilities, keyed by qubit count.
pub type RunsByQubits = Vec<(usize, Vec<FluctuationRun>)>;

/// Runs and variance record for each qubit count.
pub fn fluctuation_scaling(
    qubit_counts: &[usize],
    layers: usize,
    samples: usize,
    pairing: Pairing,
    master: u64,
) -> Result<(VarianceScaling, RunsByQubits)> {
    if samples < 30 {
        return Err(Error::InvalidArgument(format!("need at least 30 samples, got {samples}")));
    }
    let mut all = Vec::with_capacity(qubit_counts.len());
    let mut records = Vec::with_capacity(qubit_counts.len());
    for &n_q in qubit_counts {
        let runs = fluctuation_runs(n_q, layers, samples, pairing, master)?;
        let variance = population_variance(&runs.iter().map(|r| r.probs[2]).collect::<Vec<_>>());
        records.push(VarianceRecord { n_q, variance, samples });
        all.push((n_q, runs));
    }
    Ok((scaling_fit(&records)?, all))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scramblers::sample_spin_bath;

    fn spec(r: BlochAxis, i: BlochAxis, f: BlochAxis) -> OtocSpec {
        OtocSpec::central(r, i, f)
    }

    #[test]
    fn trivial_unitary_values() {
        let u = ComplexMatrix::identity(4);
        let zz = spec(BlochAxis::Z, BlochAxis::Z, BlochAxis::Z);
        assert!((otoc_value(&u, &zz).unwrap() - 2.0).abs() < 1e-14);
        let zx = spec(BlochAxis::Z, BlochAxis::X, BlochAxis::X);
        assert!((otoc_value(&u, &zx).unwrap() + 2.0).abs() < 1e-14);
    }

    #[test]
    fn haar_unitary_matches_hand_product() {
        let mut rng = stream(3, 3);
        let u = haar_unitary(8, &mut rng);
        let s = spec(BlochAxis::random(&mut rng), BlochAxis::Y, BlochAxis::Y);
        let w = embed(&pauli_along(&s.r), 0, 3).unwrap();
        let v = embed(&pauli_along(&s.i), 0, 3).unwrap();
        let wt = &u.adjoint() * &(&w * &u);
        let prod = &(&(&wt * &v) * &wt) * &v;
        let oracle = prod.trace().re / 4.0;
        assert!((otoc_value(&u, &s).unwrap() - oracle).abs() < 1e-12);
        assert!(otoc_complex(&u, &s).unwrap().im.abs() < 1e-12);
    }

    #[test]
    fn series_matches_dense_unitary() {
        let model = sample_spin_bath(3, 1.0, &mut stream(1, 1)).unwrap();
        let mut s = spec(BlochAxis::X, BlochAxis::Z, BlochAxis::normalized(0.0, 0.6, 0.8).unwrap());
        s.v_qubit = 2;
        s.bath = BathState::Product(vec![BlochAxis::Y, BlochAxis::X, BlochAxis::Z]);
        let times = [0.0, 0.7, 3.0];
        let series = otoc_time_series(&model, &s, &times).unwrap();
        for (t, got) in times.iter().zip(series) {
            let u = crate::scramblers::spin_bath_unitary(&model, *t).unwrap();
            assert!((got - otoc_value(&u, &s).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn analytic_haar_average() {
        let zz = spec(BlochAxis::X, BlochAxis::Z, BlochAxis::Z);
        assert!((haar_average_analytic(&zz, 8).unwrap() + 2.0 / 63.0).abs() < 1e-15);
        let zx = spec(BlochAxis::X, BlochAxis::Z, BlochAxis::X);
        assert_eq!(haar_average_analytic(&zx, 8).unwrap(), 0.0);
        assert!(haar_average_analytic(&zz, 1 << 10).unwrap().abs() < 2e-6);
        // single qubit: σ_n σ_z σ_n σ_z averaged over the sphere is 4/3 − 2
        assert!((haar_average_analytic(&zz, 2).unwrap() + 2.0 / 3.0).abs() < 1e-15);
        assert!(haar_average_analytic(&zz, 6).is_err());
    }

    #[test]
    fn weingarten_examples() {
        assert!((weingarten_fourth_moment(2, [0, 0, 0, 0, 0, 0, 0, 0]) - 1.0 / 3.0).abs() < 1e-15);
        assert!((weingarten_fourth_moment(2, [0, 0, 0, 0, 1, 1, 1, 1]) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(weingarten_fourth_moment(4, [0, 1, 2, 3, 0, 1, 2, 3]), 0.0);
    }

    #[test]
    fn compensated_sum_is_order_independent() {
        let v = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(v), 2.0);
        assert_eq!(compensated_sum(v.iter().rev().copied()), 2.0);
    }

    #[test]
    fn scaling_fit_exact_cases() {
        let rec = |n_q, variance| VarianceRecord { n_q, variance, samples: 1 };
        let fit = scaling_fit(&(4..=8).map(|n| rec(n, 2f64.powi(-(n as i32)))).collect::<Vec<_>>()).unwrap();
        assert!((fit.slope + std::f64::consts::LN_2).abs() < 1e-10);
        let flat = scaling_fit(&(4..=8).map(|n| rec(n, 0.3)).collect::<Vec<_>>()).unwrap();
        assert!(flat.slope.abs() < 1e-12);
        assert!(scaling_fit(&[rec(4, 0.1), rec(5, 0.05)]).is_err());
    }

    #[test]
    fn fluctuation_runs_are_reproducible() {
        let a = fluctuation_runs(3, 4, 6, Pairing::BrickWall, 1).unwrap();
        let b = fluctuation_runs(3, 4, 6, Pairing::BrickWall, 1).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|r| r.probs.iter().all(|p| (0.0..=1.0).contains(p))));
        assert_ne!(a, fluctuation_runs(3, 4, 6, Pairing::BrickWall, 2).unwrap());
    }
}
