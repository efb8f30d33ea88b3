//! Instance generators: the set cover reductions, the `G_k` family, the
//! shortest-nice-path construction and seeded random instances.

mod gk;
mod random;
mod setcover;
mod snpp;

pub use gk::{gk_edge_labels, gk_family, gk_node};
pub use random::{random_instance, RandomParams};
pub use setcover::{decode_cover, from_set_cover, EdgeClass, EdgeRole, ReducedInstance, SetCoverInstance, Variant};
pub use snpp::{from_snpp, shortest_nice_path, SnppInstance};
