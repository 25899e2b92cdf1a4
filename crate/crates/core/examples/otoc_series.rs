//! Out-of-time-order correlator of the central spin as the bath scrambles it.

use scrambling::otoc::{haar_average_analytic, otoc_time_series, OtocSpec};
use scrambling::rng::named_stream;
use scrambling::scramblers::sample_spin_bath;
use scrambling::state::BlochAxis;

fn main() -> scrambling::Result<()> {
    let n_bath = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(8);
    let model = sample_spin_bath(n_bath, 1.0, &mut named_stream(1, "couplings"))?;
    let spec = OtocSpec::central(BlochAxis::X, BlochAxis::Z, BlochAxis::Z);
    let times: Vec<f64> = (0..=20).map(|k| 2.0 * k as f64).collect();
    for (t, f) in times.iter().zip(otoc_time_series(&model, &spec, &times)?) {
        println!("Jt = {t:4.1}  F = {f:+.4}");
    }
    println!("Haar value at this size: {:+.2e}", haar_average_analytic(&spec, 1 << (n_bath + 1))?);
    Ok(())
}
