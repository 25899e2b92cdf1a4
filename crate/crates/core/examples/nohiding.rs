//! Three-qubit swap circuit: the averaged final probabilities land exactly
//! on 3/4, 1/2, 1/2 once "no measurement" is part of Bob's set, and miss
//! them when it is not.

use scrambling::protocol::{
    pauli_set_averaged_probability, recover_with_tomography, BathState, BobMeasurement, ProtocolConfig,
};
use scrambling::rng::named_stream;
use scrambling::scramblers::Scrambler;
use scrambling::state::BlochAxis;

fn main() -> scrambling::Result<()> {
    let cfg = ProtocolConfig::new(Scrambler::NoHiding).with_bath(BathState::Product(vec![BlochAxis::X, BlochAxis::X]));
    for include_identity in [true, false] {
        let mut probs = [0.0; 3];
        for (p, a) in probs.iter_mut().zip([BlochAxis::X, BlochAxis::Y, BlochAxis::Z]) {
            *p = pauli_set_averaged_probability(&cfg.clone().with_alice(a), include_identity)?;
        }
        println!("identity in set: {include_identity}  x, y, z: {probs:.6?}");
    }
    let shots = cfg.with_bob(BobMeasurement::pauli_set(true)).with_shots(8192);
    let res = recover_with_tomography(&shots, &mut named_stream(1, "shots"))?;
    println!("8192 shots per axis: fidelity {:.4}", res.fidelity);
    Ok(())
}
