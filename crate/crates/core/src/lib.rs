pub mod cli;
pub mod decompose;
pub mod ear;
pub mod error;
pub mod exact;
pub mod format;
pub mod graph;
pub mod instance;
pub mod lp;
pub mod reductions;
pub mod round;
pub mod unionfind;
