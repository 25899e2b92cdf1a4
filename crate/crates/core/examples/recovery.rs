//! Scramble a central spin into a 10-spin bath, measure it once, reverse the
//! evolution and look at what comes back.

use std::time::Instant;

use scrambling::protocol::{run_protocol_density_with, BobMeasurement, ProtocolConfig, SpectralProtocol};
use scrambling::rng::named_stream;
use scrambling::scramblers::{sample_spin_bath, Scrambler};
use scrambling::state::{BlochAxis, DensityMatrix};

fn main() -> scrambling::Result<()> {
    let n_bath = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10);
    let seed = 7;
    let model = sample_spin_bath(n_bath, 1.0, &mut named_stream(seed, "couplings"))?;
    let bob = BlochAxis::random(&mut named_stream(seed, "bob"));

    let start = Instant::now();
    let engine = SpectralProtocol::new(&model)?;
    println!("diagonalized {} qubits in {:.1?}", model.n_qubits(), start.elapsed());

    let cfg = ProtocolConfig::new(Scrambler::SpinBath { model, time: 20.0 })
        .with_times(20.0, 20.0)
        .with_bob(BobMeasurement::axis(bob));
    let res = run_protocol_density_with(&engine, &cfg)?;
    let target = DensityMatrix::from_bloch([0.0, 0.0, 0.5])?;

    println!("bob axis {:?}", bob.components());
    println!("prob(+) along x, y, z: {:?}", res.axis_probabilities);
    println!("distance to diag(3/4, 1/4): {:.4}", res.final_state.trace_distance(&target)?);
    println!("fidelity of the reconstructed state: {:.4}", res.fidelity);
    println!("total {:.1?}", start.elapsed());
    Ok(())
}
