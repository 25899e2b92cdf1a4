//! One PASS/FAIL line per acceptance criterion, with the measured numbers.
//! Exits 0 unless ACCEPTANCE_STRICT=1 is set and something failed.

mod common;

use std::time::Instant;

use scrambling::classical::{butterfly_ensemble, ClassicalModel, ClassicalProtocol};
use scrambling::experiments::{run_with_workers, ExperimentConfig};
use scrambling::otoc::{
    fluctuation_scaling, haar_average_analytic, haar_average_mc, haar_fourth_moment_check, otoc_time_series,
    otoc_value, random_index_tuple, OtocSpec,
};
use scrambling::protocol::{
    echo_grids_with, final_central_state_with, final_probability_with, joint_probabilities_with,
    joint_probability_channel, joint_probability_heisenberg, pauli_set_averaged_probability,
    recover_with_tomography, run_protocol_density_with, BathState, BobMeasurement, Direction, ProtocolConfig,
    SpectralProtocol,
};
use scrambling::rng::named_stream;
use scrambling::scramblers::{build_random_circuit, circuit_unitary, sample_spin_bath, Pairing, Scrambler, SpinBathModel};
use scrambling::state::{BlochAxis, DensityMatrix, PureState};

const SEED: u64 = 7;
const N_BATH: usize = 10;
const T_SAT: f64 = 20.0;

struct Report {
    failed: Vec<u32>,
    since: Instant,
}

impl Report {
    fn line(&mut self, n: u32, pass: bool, summary: String) {
        let secs = self.since.elapsed().as_secs_f64();
        println!("criterion {n}: {}  {summary}  [{secs:.1} s]", if pass { "PASS" } else { "FAIL" });
        self.since = Instant::now();
        if !pass {
            self.failed.push(n);
        }
    }
}

fn detail(text: String) {
    println!("    {text}");
}

fn spread(values: &[f64]) -> f64 {
    values.iter().cloned().fold(f64::MIN, f64::max) - values.iter().cloned().fold(f64::MAX, f64::min)
}

struct Saturated {
    model: SpinBathModel,
    engine: SpectralProtocol,
    bob: BlochAxis,
}

impl Saturated {
    fn config(&self) -> ProtocolConfig {
        ProtocolConfig::new(Scrambler::SpinBath { model: self.model.clone(), time: T_SAT })
            .with_times(T_SAT, T_SAT)
            .with_bob(BobMeasurement::axis(self.bob))
    }
}

fn recovery(report: &mut Report) -> Saturated {
    let start = Instant::now();
    let model = sample_spin_bath(N_BATH, 1.0, &mut named_stream(SEED, "couplings")).unwrap();
    let bob = BlochAxis::random(&mut named_stream(SEED, "bob"));
    let engine = SpectralProtocol::new(&model).unwrap();
    let sat = Saturated { model, engine, bob };
    let res = run_protocol_density_with(&sat.engine, &sat.config()).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let target = DensityMatrix::from_bloch([0.0, 0.0, 0.5]).unwrap();
    let dist = res.final_state.trace_distance(&target).unwrap();
    report.line(
        1,
        dist < 0.02 && elapsed < 60.0,
        format!("N_s=10, Jt1=Jt2=20: trace distance to diag(3/4,1/4) = {dist:.4} (< 0.02); runtime {elapsed:.1} s (< 60 s)"),
    );
    let [px, py, pz] = res.axis_probabilities;
    let ok = (pz - 0.75).abs() < 0.02 && (px - 0.5).abs() < 0.02 && (py - 0.5).abs() < 0.02;
    report.line(2, ok, format!("prob z = {pz:.4} (0.75 ± 0.02), x = {px:.4}, y = {py:.4} (0.5 ± 0.02)"));
    sat
}

fn oracle_equivalence(report: &mut Report) {
    let worst = (0..50)
        .map(|k| {
            let cfg = common::random_config(k);
            (joint_probability_heisenberg(&cfg).unwrap() - joint_probability_channel(&cfg).unwrap()).abs()
        })
        .fold(0.0, f64::max);
    report.line(3, worst < 1e-10, format!("50 configs on 3-5 qubits: max |Heisenberg - channel| = {worst:.1e} (< 1e-10)"));
}

fn haar_analytics(report: &mut Report) {
    let dim = 8;
    let parallel = OtocSpec::central(BlochAxis::X, BlochAxis::Z, BlochAxis::Z);
    let orthogonal = OtocSpec::central(BlochAxis::X, BlochAxis::Z, BlochAxis::X);
    let par = haar_average_mc(&parallel, dim, 10_000, &mut named_stream(SEED, "haar-parallel")).unwrap();
    let orth = haar_average_mc(&orthogonal, dim, 10_000, &mut named_stream(SEED, "haar-orthogonal")).unwrap();
    let literal = 2.0 / 63.0;
    let closed = haar_average_analytic(&parallel, dim).unwrap();
    let par_literal = (par.mean - literal).abs() < 3.0 * par.std_error;
    let par_closed = (par.mean - closed).abs() < 3.0 * par.std_error;
    let orth_ok = orth.mean.abs() < 3.0 * orth.std_error;

    let mut tuples = named_stream(SEED, "tuples");
    let mut moments_ok = 0;
    for dim in [2usize, 4] {
        for k in 0..10 {
            let idx = random_index_tuple(dim, &mut tuples);
            let m = haar_fourth_moment_check(dim, idx, 20_000, &mut named_stream(k, &format!("moment-{dim}"))).unwrap();
            moments_ok += m.within(3.0) as usize;
        }
    }
    report.line(
        4,
        par_literal && orth_ok && moments_ok == 20,
        format!(
            "dim 8, 10^4 samples: parallel {:+.4} ± {:.4} vs +2/63 = {literal:+.4} ({}); orthogonal {:+.4} ± {:.4} vs 0 ({}); fourth moments {moments_ok}/20 within 3σ",
            par.mean,
            par.std_error,
            if par_literal { "ok" } else { "off" },
            orth.mean,
            orth.std_error,
            if orth_ok { "ok" } else { "off" },
        ),
    );
    detail(format!(
        "parallel mean vs closed form -⟨σ_iσ_f⟩/(d²-1) = {closed:+.4}: {}",
        if par_closed { "within 3σ" } else { "outside 3σ" }
    ));
}

fn echo_contrast(report: &mut Report, sat: &Saturated) {
    let ts: Vec<f64> = (0..20).map(|k| 40.0 * k as f64 / 19.0).collect();
    let cfg = sat.config();
    let grids = echo_grids_with(&sat.engine, &cfg, &ts, &ts, &[Direction::Reversed, Direction::Forward]).unwrap();
    let late: Vec<usize> = (0..ts.len()).filter(|&k| ts[k] >= 20.0).collect();
    let rev: Vec<f64> = late.iter().map(|&k| grids[0].at(k, k)).collect();
    let fwd: Vec<f64> = late.iter().map(|&k| grids[1].at(k, k)).collect();
    let rev_dev = rev.iter().map(|p| (p - 0.75).abs()).fold(0.0, f64::max);
    let fwd_max = fwd.iter().cloned().fold(f64::MIN, f64::max);
    report.line(
        5,
        rev_dev < 0.02 && fwd_max < 0.55,
        format!("20x20 grid to Jt=40, Jt1 >= 20: reversed diagonal max |p - 0.75| = {rev_dev:.4} (< 0.02); forward diagonal max = {fwd_max:.4} (< 0.55)"),
    );
}

fn nohiding(report: &mut Report) {
    let cfg = ProtocolConfig::new(Scrambler::NoHiding).with_bath(BathState::Product(vec![BlochAxis::X, BlochAxis::X]));
    let probs = [BlochAxis::Z, BlochAxis::X, BlochAxis::Y]
        .map(|a| pauli_set_averaged_probability(&cfg.clone().with_alice(a), true).unwrap());
    let dev = probs.iter().zip([0.75, 0.5, 0.5]).map(|(p, t)| (p - t).abs()).fold(0.0, f64::max);
    let shots = cfg.with_bob(BobMeasurement::pauli_set(true)).with_shots(8192);
    let fidelity = recover_with_tomography(&shots, &mut named_stream(SEED, "shots")).unwrap().fidelity;
    report.line(
        6,
        dev < 1e-10 && fidelity >= 0.98,
        format!("z, x, y = {probs:.12?}, max deviation {dev:.1e} (< 1e-10); 8192-shot fidelity {fidelity:.4} (>= 0.98)"),
    );
}

fn fluctuations(report: &mut Report) {
    let start = Instant::now();
    let (fit, runs) = fluctuation_scaling(&[4, 5, 6, 7, 8], 1000, 100, Pairing::BrickWall, 11).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let c: Vec<f64> = fit.records.iter().map(|r| r.variance).collect();
    let monotone = c.windows(2).all(|w| w[1] < w[0]);
    let slope_ok = (-1.1..=-0.4).contains(&fit.slope);

    let (_, last) = runs.last().unwrap();
    let theory = [0.5, 0.5, 0.75];
    let mut cluster_ok = true;
    let mut parts = Vec::new();
    for (axis, &t) in ["x", "y", "z"].iter().zip(&theory) {
        let p: Vec<f64> = last.iter().map(|r| r.probs[axis_index(axis)]).collect();
        let n = p.len() as f64;
        let mean = p.iter().sum::<f64>() / n;
        let std = (p.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt();
        let inside = p.iter().filter(|v| (*v - t).abs() <= 0.02).count();
        let worst = p.iter().map(|v| (v - t).abs()).fold(0.0, f64::max);
        cluster_ok &= (mean - t).abs() < 0.02 && std < 0.02;
        parts.push(format!("{axis}: mean {mean:.4} std {std:.4}, {inside}/{} runs inside ±0.02, worst {worst:.4}", p.len()));
    }
    report.line(
        7,
        monotone && slope_ok && cluster_ok,
        format!(
            "1000 layers, 100 samples: C decreasing in n_q {monotone}; ln C slope {:.3} in [-1.1, -0.4]; n_q=8 mean and spread within 0.02 {cluster_ok}; {elapsed:.1} s",
            fit.slope
        ),
    );
    detail(format!("C(n_q=4..8) = [{}]", c.iter().map(|v| format!("{v:.3e}")).collect::<Vec<_>>().join(", ")));
    for p in parts {
        detail(p);
    }
}

fn axis_index(name: &str) -> usize {
    match name {
        "x" => 0,
        "y" => 1,
        _ => 2,
    }
}

fn classical(report: &mut Report) {
    let seed = 5;
    let model = ClassicalModel::from_spin_bath(&sample_spin_bath(30, 1.0, &mut named_stream(seed, "couplings")).unwrap());
    let bob = BlochAxis::random(&mut named_stream(seed, "bob"));
    let quiet = ClassicalProtocol { t1: 20.0, dt: 1e-3, measure: None, stride: usize::MAX };
    let measured = ClassicalProtocol { measure: Some(bob), ..quiet };
    let unmeasured = butterfly_ensemble(&model, &quiet, 100, seed).unwrap();
    let finals = butterfly_ensemble(&model, &measured, 100, seed).unwrap();
    let worst = unmeasured.iter().map(|z| (z - 1.0).abs()).fold(0.0, f64::max);
    let mean = finals.iter().map(|z| (z - 1.0).abs()).sum::<f64>() / finals.len() as f64;
    report.line(
        8,
        worst < 1e-5 && mean > 0.5,
        format!("N_s=30, Jt1=20, dt=1e-3: unmeasured max |S^z - 1| = {worst:.1e} (< 1e-5); measured mean |S^z - 1| = {mean:.3} (> 0.5) over 100 seeds"),
    );
}

fn properties(report: &mut Report, sat: &Saturated) {
    let mut ok = true;
    let mut check = |pass: bool, text: String| {
        ok &= pass;
        detail(format!("{} {text}", if pass { "ok  " } else { "FAIL" }));
    };
    let base = sat.config();

    let mut axes = named_stream(SEED, "axes");
    let probs: Vec<f64> = (0..20)
        .map(|_| final_probability_with(&sat.engine, &base.clone().with_bob(BobMeasurement::axis(BlochAxis::random(&mut axes)))).unwrap())
        .collect();
    check(spread(&probs) < 0.03, format!("Bob-axis independence: spread over 20 axes {:.4} (< 0.03)", spread(&probs)));

    let mut rng = named_stream(SEED, "bath");
    let product = BathState::Product((0..N_BATH).map(|_| BlochAxis::random(&mut rng)).collect());
    let mixed = final_probability_with(&sat.engine, &base).unwrap();
    let pure = final_probability_with(&sat.engine, &base.clone().with_bath(product)).unwrap();
    check((mixed - pure).abs() < 0.03, format!("bath independence: |{mixed:.4} - {pure:.4}| (< 0.03)"));

    let mut rng = named_stream(SEED, "initial");
    let mut worst = 0.0f64;
    for _ in 0..3 {
        let (a, b) = (BlochAxis::random(&mut rng), BlochAxis::random(&mut rng));
        let fa = final_central_state_with(&sat.engine, &base.clone().with_initial(a)).unwrap();
        let fb = final_central_state_with(&sat.engine, &base.clone().with_initial(b)).unwrap();
        let before = PureState::along(&a).density().trace_distance(&PureState::along(&b).density()).unwrap();
        worst = worst.max((fa.trace_distance(&fb).unwrap() - 0.5 * before).abs());
    }
    check(worst < 0.03, format!("recovery map halves trace distance: worst deviation {worst:.4} (< 0.03)"));

    let mut rng = named_stream(SEED, "pairs");
    let mut worst = 0.0f64;
    for _ in 0..3 {
        let (i, f) = (BlochAxis::random(&mut rng), BlochAxis::random(&mut rng));
        let (plus, minus) = joint_probabilities_with(&sat.engine, &base.clone().with_initial(i).with_alice(f)).unwrap();
        let expected = 0.25 + 2.0 * f.dot(&i) / 16.0;
        worst = worst.max((plus - expected).abs()).max((minus - expected).abs());
    }
    check(worst < 0.02, format!("joint probability minus two-point terms: worst {worst:.4} (< 0.02)"));

    let spec = OtocSpec::central(sat.bob, BlochAxis::Z, BlochAxis::Z);
    let haar = haar_average_analytic(&spec, 1 << (N_BATH + 1)).unwrap();
    let f = otoc_time_series(&sat.model, &spec, &[T_SAT]).unwrap()[0];
    check(
        f.abs() <= 10.0 * haar.abs() + 0.05,
        format!("saturated OTOC bound, spin bath N_s=10 Jt=20, i=f=z: F = {f:+.4}, bound {:.4}", 10.0 * haar.abs() + 0.05),
    );
    let circuit = circuit_unitary(&build_random_circuit(8, 1000, &mut named_stream(SEED, "circuit")).unwrap()).unwrap();
    let spec = OtocSpec::central(BlochAxis::X, BlochAxis::Z, BlochAxis::Z);
    let f = otoc_value(&circuit, &spec).unwrap();
    let bound = 10.0 * haar_average_analytic(&spec, 256).unwrap().abs() + 0.05;
    check(f.abs() <= bound, format!("saturated OTOC bound, circuit n_q=8 1000 layers: F = {f:+.4}, bound {bound:.4}"));

    let identical = determinism();
    check(identical.is_ok(), format!("byte-identical outputs across reruns and worker counts: {}", identical.map_or_else(|e| e, |n| format!("{n} files"))));

    detail("remaining invariants run as test targets: properties, oracles, saturation, cli".into());
    report.line(9, ok, "property and determinism checks (details above)".into());
}

fn determinism() -> Result<usize, String> {
    let configs = [
        r#"{"kind": "echo-grid", "seed": 1, "spin_bath": {"n_bath": 5}, "t1": {"start": 0, "stop": 40, "count": 8}, "t2": {"start": 0, "stop": 40, "count": 8}, "initial": [0, 0, 1], "alice": [0, 0, 1]}"#,
        r#"{"kind": "echo-grid-forward", "seed": 1, "spin_bath": {"n_bath": 5}, "t1": {"start": 0, "stop": 40, "count": 8}, "t2": {"start": 0, "stop": 40, "count": 8}, "initial": [0, 0, 1], "alice": [0, 0, 1]}"#,
        r#"{"kind": "recover", "seed": 2, "scrambler": {"spin-bath": {"n_bath": 5, "time": 20}}, "initial": [0, 0, 1], "shots": 1000}"#,
        r#"{"kind": "nohiding", "seed": 3, "initial": [0, 0, 1], "shots": 1000}"#,
        r#"{"kind": "otoc-series", "seed": 4, "spin_bath": {"n_bath": 5}, "times": {"start": 0, "stop": 20, "count": 11}}"#,
        r#"{"kind": "haar-check", "seed": 5, "dims": [4], "samples": 200, "pairs": [[[0, 0, 1], [0, 0, 1]]], "moment_dims": [2], "moment_tuples": 2, "moment_samples": 200}"#,
        r#"{"kind": "fluctuation-scaling", "seed": 6, "qubits": [3, 4, 5], "layers": 10, "samples": 30}"#,
        r#"{"kind": "classical-butterfly", "seed": 7, "n_bath": 5, "t1": 2.0, "dt": 0.01, "stride": 10, "ensemble": 6}"#,
    ];
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut files = 0;
    for text in configs {
        let mut cfg = ExperimentConfig::from_json(text).map_err(|e| e.to_string())?;
        let mut hashes = Vec::new();
        for (run, workers) in [(0, Some(1)), (1, Some(1)), (2, Some(2)), (3, None)] {
            cfg.set_output(dir.path().join(format!("{}_{run}", cfg.kind())).to_string_lossy().into_owned());
            let manifest = run_with_workers(&cfg, workers).map_err(|e| format!("{}: {e}", cfg.kind()))?;
            hashes.push(manifest.outputs.into_iter().map(|o| o.sha256).collect::<Vec<_>>());
        }
        if hashes.windows(2).any(|w| w[0] != w[1]) {
            return Err(format!("{} differs between runs", cfg.kind()));
        }
        files += hashes[0].len();
    }
    Ok(files)
}

fn main() {
    let start = Instant::now();
    let mut report = Report { failed: Vec::new(), since: Instant::now() };
    let sat = recovery(&mut report);
    oracle_equivalence(&mut report);
    haar_analytics(&mut report);
    echo_contrast(&mut report, &sat);
    nohiding(&mut report);
    fluctuations(&mut report);
    classical(&mut report);
    properties(&mut report, &sat);
    println!(
        "acceptance: {}/9 passed in {:.1} s{}",
        9 - report.failed.len(),
        start.elapsed().as_secs_f64(),
        if report.failed.is_empty() { String::new() } else { format!("; failed {:?}", report.failed) }
    );
    if !report.failed.is_empty() && std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
