//! Monte Carlo over Haar unitaries against the closed-form OTOC average and
//! the fourth-moment Weingarten formula.

use scrambling::otoc::{haar_average_analytic, haar_average_mc, haar_fourth_moment_check, random_index_tuple, OtocSpec};
use scrambling::rng::named_stream;
use scrambling::state::BlochAxis;

fn main() -> scrambling::Result<()> {
    for (name, f) in [("parallel", BlochAxis::Z), ("orthogonal", BlochAxis::X)] {
        let spec = OtocSpec::central(BlochAxis::X, BlochAxis::Z, f);
        for dim in [4, 8, 16] {
            let est = haar_average_mc(&spec, dim, 10_000, &mut named_stream(dim as u64, name))?;
            println!(
                "{name:10} dim {dim:2}: {:+.4} ± {:.4}  (closed form {:+.4})",
                est.mean,
                est.std_error,
                haar_average_analytic(&spec, dim)?
            );
        }
    }
    let mut tuples = named_stream(0, "tuples");
    for dim in [2, 4] {
        for k in 0..5 {
            let idx = random_index_tuple(dim, &mut tuples);
            let m = haar_fourth_moment_check(dim, idx, 20_000, &mut named_stream(k, "moments"))?;
            println!("dim {dim} {idx:?}: mc {:+.4}{:+.4}i  formula {:+.4}  within 3σ: {}", m.mc[0], m.mc[1], m.analytic, m.within(3.0));
        }
    }
    Ok(())
}
