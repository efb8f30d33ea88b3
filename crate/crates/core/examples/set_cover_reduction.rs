//! Set cover instances turned into robust assignment instances, and covers
//! read back from solutions.

use robust_assignment::exact::{solve_exact, BnbConfig};
use robust_assignment::instance::verify_solution;
use robust_assignment::reductions::{decode_cover, from_set_cover, EdgeClass, SetCoverInstance, Variant};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sc = SetCoverInstance::new(3, vec![vec![1, 2], vec![2, 3], vec![3]])?;
    println!("ground set 1..={}, sets {:?}, smallest cover {}", sc.k(), sc.sets(), sc.min_cover_size());

    for variant in [Variant::Basic, Variant::UniformWeighted, Variant::UniformCard] {
        let ri = from_set_cover(&sc, variant)?;
        let g = ri.rap.graph();
        println!(
            "\n{variant}: {} + {} nodes, {} edges, {} vulnerable, {} indicator edges",
            g.n_r(),
            g.n_t(),
            ri.rap.num_edges(),
            ri.rap.vulnerable_edges().len(),
            ri.edges_of(EdgeClass::E4).len()
        );
        for chosen in [vec![0], vec![0, 1], vec![0, 2], vec![0, 1, 2]] {
            let x = ri.solution_for_cover(&chosen);
            let verdict = match verify_solution(&ri.rap, &x) {
                Ok(_) => "feasible".to_string(),
                Err(err) => err.to_string(),
            };
            println!("  sets {chosen:?} cover={} -> {verdict}", sc.is_cover(&chosen));
        }
    }

    // Small enough for the exact solver: the optimum encodes a minimum cover.
    let small = SetCoverInstance::new(2, vec![vec![1], vec![1, 2]])?;
    let ri = from_set_cover(&small, Variant::Basic)?;
    let x = solve_exact(&ri.rap, &BnbConfig::with_max_edges(40))?;
    println!("\nbasic reduction of {:?}: optimum cost {}, cover {:?}", small.sets(), x.cost(), decode_cover(&ri, &x)?);
    Ok(())
}
