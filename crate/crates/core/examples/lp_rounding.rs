//! The LP relaxation and its randomized rounding on a random instance.
//!
//! `cargo run --release --example lp_rounding -- [seed] [lp-file]` also
//! writes the relaxation in LP format when a file name is given.

use robust_assignment::exact::{solve_exact, BnbConfig};
use robust_assignment::lp::{build_lp, solve_lp, Tolerances};
use robust_assignment::reductions::{random_instance, RandomParams};
use robust_assignment::round::{LpRounder, RoundConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(3);
    let inst = random_instance(&RandomParams {
        n_r: 5,
        n_t: 5,
        edge_prob: 0.6,
        vuln_prob: 0.6,
        cost_range: (1, 9),
        seed,
    })?;
    println!(
        "instance: {} edges, {} vulnerable, uniform {}",
        inst.num_edges(),
        inst.vulnerable_edges().len(),
        inst.is_uniform()
    );

    let lp = build_lp(&inst)?;
    if let Some(path) = args.next() {
        std::fs::write(&path, lp.program().to_lp_format())?;
        println!("wrote {path}");
    }
    let frac = solve_lp(&lp, Tolerances::default())?;
    let opt = solve_exact(&inst, &BnbConfig::with_max_edges(30))?;
    println!(
        "LP: {} variables, value {:.4} after {} pivots; exact optimum {}",
        lp.num_vars(),
        frac.objective,
        frac.iterations,
        opt.cost()
    );

    // The rounder solves the relaxation of the uniformized instance once.
    let rounder = LpRounder::new(&inst, RoundConfig::default())?;
    let mut costs = Vec::new();
    for s in 0..10 {
        let (x, trace) = rounder.run(s)?;
        if s == 0 {
            print!("\ntrace for seed 0:\n{trace}");
        }
        costs.push(x.cost());
    }
    let mean = costs.iter().sum::<f64>() / costs.len() as f64;
    println!("\ncosts over 10 seeds: {costs:?}\nmean ratio to optimum {:.3}", mean / opt.cost());
    Ok(())
}
