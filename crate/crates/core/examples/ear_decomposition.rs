//! Ear decompositions of a small matching-covered graph and the solution
//! kept from them.

use robust_assignment::ear::{ear_decomposition_with, solve_ear_with, EarOrder};
use robust_assignment::graph::{allowed_edges, BipartiteMultigraph};
use robust_assignment::instance::RapInstance;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // A 6-cycle with two chords plus a dispensable pendant path.
    let g = BipartiteMultigraph::from_edges(
        4,
        4,
        [(0, 0), (1, 0), (1, 1), (2, 1), (2, 2), (0, 2), (0, 1), (2, 0), (3, 3), (3, 2)],
    )?;
    println!("allowed edges: {:?}", allowed_edges(&g)?);

    let core = BipartiteMultigraph::from_edges(3, 3, g.edges()[..8].iter().copied())?;
    for order in [EarOrder::Lowest, EarOrder::Random(5)] {
        let dec = ear_decomposition_with(&core, order)?;
        dec.validate(&core)?;
        println!("\n{order}:");
        for (j, ear) in dec.ears().iter().enumerate() {
            println!("  P{j} {:?}{}", ear.edges, if ear.trivial { " (trivial)" } else { "" });
        }
        println!("  kept {:?}", dec.kept_edges());
    }

    // The pendant edge to t3 cannot fail; everything else can.
    let inst = RapInstance::new(g, (0..8).chain([9]), vec![1.0; 10])?;
    let (x, report) = solve_ear_with(&inst, EarOrder::Lowest)?;
    println!("\nsolution {:?} ({} dispensable edges dropped)", x.edges(), report.dispensable);
    print!("{report}");
    Ok(())
}
