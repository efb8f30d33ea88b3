//! Robust assignment with two vulnerable edges built from a shortest nice
//! path question.

use robust_assignment::exact::{solve_exact, BnbConfig};
use robust_assignment::graph::BipartiteMultigraph;
use robust_assignment::reductions::{from_snpp, shortest_nice_path, SnppInstance};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // A 3x3 grid-like bipartite graph.
    let h = BipartiteMultigraph::from_edges(
        3,
        3,
        [(0, 0), (0, 1), (1, 0), (1, 1), (1, 2), (2, 1), (2, 2)],
    )?;
    for (s, t) in [(0, 0), (0, 2), (2, 0)] {
        let sn = from_snpp(&h, s, t)?;
        let Some(path) = shortest_nice_path(&h, s, t)? else {
            println!("r{s} -> t{t}: no nice path");
            continue;
        };
        let opt = solve_exact(&sn.rap, &BnbConfig::default())?;
        println!(
            "r{s} -> t{t}: nice path {:?}, predicted optimum {}, exact {} (f1 = {}, f2 = {})",
            path,
            SnppInstance::predicted_optimum(h.num_nodes(), path.len()),
            opt.cost(),
            sn.f1,
            sn.f2
        );
    }
    Ok(())
}
