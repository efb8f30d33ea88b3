//! Parsing an instance and checking solutions, with the certificate or the
//! first failing scenario.

use robust_assignment::format::{parse_instance, parse_solution};
use robust_assignment::instance::{prune_to_minimal, verify_solution, Solution};

const INSTANCE: &str = "\
# a 4-cycle with one invulnerable edge
rap 1
graph 2 2
edge 0 0 1 v
edge 1 0 1 v
edge 1 1 1 i
edge 0 1 1 v
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let inst = parse_instance(INSTANCE)?;
    for text in ["solution 2\n1\n3\n", "solution 3\n0\n2\n3\n", "solution 4\n0\n1\n2\n3\n"] {
        let x = parse_solution(&inst, text)?;
        match verify_solution(&inst, &x) {
            Ok(cert) => {
                println!("{:?}: feasible", x.edges());
                for (s, m) in cert.iter() {
                    println!("  scenario {s}: {:?}", m.edges());
                }
            }
            Err(err) => println!("{:?}: {err}", x.edges()),
        }
    }
    let minimal = prune_to_minimal(&inst, &Solution::all_edges(&inst))?;
    println!("minimal subset of all edges: {:?}, cost {}", minimal.edges(), minimal.cost());
    Ok(())
}
