//! Ear-based solutions against exact optima on the `G_k` family.
//!
//! Run with `cargo run --release --example gk_tightness`.

use robust_assignment::ear::{solve_ear_with, EarOrder};
use robust_assignment::exact::{lower_bounds, solve_exact, BnbConfig};
use robust_assignment::reductions::gk_family;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("{:>3} {:>6} {:>6} {:>6} {:>8} {:>11}", "k", "edges", "opt", "ear", "ratio", "best random");
    for k in 3..=6 {
        let inst = gk_family(k)?;
        let opt = solve_exact(&inst, &BnbConfig::with_max_edges(32))?;
        let (ear, _) = solve_ear_with(&inst, EarOrder::Lowest)?;
        // A few random ear orders show how much the decomposition matters.
        let best_random = (1..=20)
            .map(|seed| solve_ear_with(&inst, EarOrder::Random(seed)).map(|(x, _)| x.len()))
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .min()
            .unwrap_or(ear.len());
        assert_eq!(lower_bounds(&inst)?.value() as usize, opt.len());
        println!(
            "{k:>3} {:>6} {:>6} {:>6} {:>8.3} {:>11}",
            inst.num_edges(),
            opt.len(),
            ear.len(),
            ear.len() as f64 / opt.len() as f64,
            best_random
        );
    }
    Ok(())
}
