use rand::Rng;
use scrambling::linalg::haar_unitary;
use scrambling::protocol::{BathState, BobMeasurement, ProtocolConfig};
use scrambling::rng::stream;
use scrambling::scramblers::{build_random_circuit, Scrambler};
use scrambling::state::{BlochAxis, DensityMatrix};

/// Seeded protocol instance on 3 to 5 qubits: circuits or Haar unitaries,
/// with mixed, product or explicitly mixed baths.
pub fn random_config(k: u64) -> ProtocolConfig {
    let mut rng = stream(400, k);
    let n = 3 + (k % 3) as usize;
    let scrambler = if k.is_multiple_of(2) {
        Scrambler::Circuit(build_random_circuit(n, 6, &mut rng).unwrap())
    } else {
        Scrambler::explicit(haar_unitary(1 << n, &mut rng)).unwrap()
    };
    let bath = match k % 4 {
        0 => BathState::MaximallyMixed,
        1 => BathState::Product((1..n).map(|_| BlochAxis::random(&mut rng)).collect()),
        _ => {
            let mut rho = DensityMatrix::maximally_mixed(n - 1);
            for _ in 0..2 {
                let u = haar_unitary(1 << (n - 1), &mut rng);
                let w: f64 = rng.random();
                let pure = DensityMatrix::from_bloch([0.0, 0.0, 1.0]).unwrap();
                let mut pure_n = pure.clone();
                for _ in 2..n {
                    pure_n = pure_n.tensor(&pure).unwrap();
                }
                let mixed = &rho.matrix().scale_real(w) + &pure_n.evolve(&u).unwrap().matrix().scale_real(1.0 - w);
                rho = DensityMatrix::new(mixed).unwrap();
            }
            BathState::Explicit(rho)
        }
    };
    ProtocolConfig::new(scrambler)
        .with_initial(BlochAxis::random(&mut rng))
        .with_bob(BobMeasurement::axis(BlochAxis::random(&mut rng)))
        .with_alice(BlochAxis::random(&mut rng))
        .with_bath(bath)
}
