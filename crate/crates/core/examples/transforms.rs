//! Balanced completion and uniformization, with solutions carried across.

use robust_assignment::exact::{solve_exact, BnbConfig};
use robust_assignment::format::write_instance;
use robust_assignment::graph::BipartiteMultigraph;
use robust_assignment::instance::{balanced_completion, uniformize, verify_solution, RapInstance};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Three resources, two tasks; edge 1 cannot fail.
    let g = BipartiteMultigraph::from_edges(3, 2, [(0, 0), (1, 0), (1, 1), (2, 1), (2, 0)])?;
    let inst = RapInstance::new(g, [0, 2, 3, 4], vec![2.0, 5.0, 1.0, 1.0, 3.0])?;

    let completion = balanced_completion(&inst);
    println!("completion adds {} dummy edges:\n{}", completion.added_edges(), write_instance(&completion.instance));
    let opt = solve_exact(&inst, &BnbConfig::default())?;
    let balanced_opt = solve_exact(&completion.instance, &BnbConfig::default())?;
    println!("optimum {} on the original, {} on the completion", opt.cost(), balanced_opt.cost());

    let balanced = &completion.instance;
    let uni = uniformize(balanced)?;
    let x = completion.encode(&opt);
    let encoded = uni.encode(&x);
    verify_solution(&uni.instance, &encoded)?;
    let decoded = uni.decode(balanced, &encoded);
    verify_solution(balanced, &decoded)?;
    println!(
        "uniformized: {} edges; encoded cost {} (at most twice {}), decoded back to {}",
        uni.instance.num_edges(),
        encoded.cost(),
        x.cost(),
        decoded.cost()
    );
    Ok(())
}
