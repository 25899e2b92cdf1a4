//! How much does the recovery probability vary from one random circuit to
//! the next, and how fast does that spread shrink with system size?

use std::time::Instant;

use scrambling::otoc::fluctuation_scaling;
use scrambling::scramblers::Pairing;

fn main() -> scrambling::Result<()> {
    let layers = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1000);
    let samples = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(100);
    let start = Instant::now();
    let (fit, runs) = fluctuation_scaling(&[4, 5, 6, 7, 8], layers, samples, Pairing::BrickWall, 11)?;
    for (rec, (_, runs)) in fit.records.iter().zip(&runs) {
        let worst = runs.iter().map(|r| (r.probs[2] - 0.75).abs()).fold(0.0, f64::max);
        println!("n_q = {}  C = {:.3e}  max |p_z - 0.75| = {:.4}", rec.n_q, rec.variance, worst);
    }
    println!("slope of ln C vs n_q: {:.3}", fit.slope);
    println!("{:.1?}", start.elapsed());
    Ok(())
}
