//! Echo contrast on a coarse (t1, t2) grid: undoing the scrambling brings
//! back 3/4 on the diagonal, running it forward twice does not.

use scrambling::protocol::{echo_grids_with, BobMeasurement, Direction, ProtocolConfig, SpectralProtocol};
use scrambling::rng::named_stream;
use scrambling::scramblers::{sample_spin_bath, Scrambler};
use scrambling::state::BlochAxis;

fn main() -> scrambling::Result<()> {
    let n_bath = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(8);
    let model = sample_spin_bath(n_bath, 1.0, &mut named_stream(20, "couplings"))?;
    let engine = SpectralProtocol::new(&model)?;
    let cfg = ProtocolConfig::new(Scrambler::SpinBath { model, time: 20.0 })
        .with_bob(BobMeasurement::axis(BlochAxis::random(&mut named_stream(20, "bob"))));
    let ts: Vec<f64> = (0..=8).map(|k| 5.0 * k as f64).collect();
    let grids = echo_grids_with(&engine, &cfg, &ts, &ts, &[Direction::Reversed, Direction::Forward])?;
    for (grid, name) in grids.iter().zip(["reversed", "forward"]) {
        println!("{name}: rows t1, columns t2 = {ts:?}");
        for (t1, row) in ts.iter().zip(&grid.prob) {
            let cells: Vec<String> = row.iter().map(|p| format!("{p:.3}")).collect();
            println!("{t1:5.1}  {}", cells.join(" "));
        }
    }
    Ok(())
}
