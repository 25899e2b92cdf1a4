//! Classical spins come back exactly when the dynamics is reversed, unless
//! someone looks at the central spin halfway.

use scrambling::classical::{butterfly_ensemble, run_classical_protocol, ClassicalModel, ClassicalProtocol};
use scrambling::rng::named_stream;
use scrambling::scramblers::sample_spin_bath;
use scrambling::state::BlochAxis;

fn main() -> scrambling::Result<()> {
    let seed = 5;
    let model = ClassicalModel::from_spin_bath(&sample_spin_bath(30, 1.0, &mut named_stream(seed, "couplings"))?);
    let bob = BlochAxis::random(&mut named_stream(seed, "bob"));
    let quiet = ClassicalProtocol { t1: 20.0, dt: 1e-3, measure: None, stride: 1000 };

    let t = run_classical_protocol(&model, &quiet, &mut named_stream(seed, "bath"))?;
    println!("no measurement: S^z(2t1) - 1 = {:.2e}", t.final_central_z() - 1.0);
    for (time, z) in t.times.iter().zip(&t.central_z).step_by(4) {
        println!("  t = {time:5.1}  S^z = {z:+.4}");
    }

    let measured = ClassicalProtocol { measure: Some(bob), ..quiet };
    let finals = butterfly_ensemble(&model, &measured, 100, seed)?;
    let mean = finals.iter().map(|z| (z - 1.0).abs()).sum::<f64>() / finals.len() as f64;
    println!("with measurement: mean |S^z(2t1) - 1| over {} runs = {mean:.3}", finals.len());
    Ok(())
}
