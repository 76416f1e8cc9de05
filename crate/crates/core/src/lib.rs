//! String graphs: exact construction from planar curves, balanced
//! separators, the constructive extraction procedures for independent and
//! clique-free subsets, quasiplanarity of topological drawings, and exact
//! oracles for checking all of these at small sizes.

pub mod error;
pub mod extract;
pub mod formats;
pub mod generate;
pub mod geometry;
pub mod graph;
pub mod oracles;
pub mod quasiplanar;
pub mod report;
pub mod separator;

pub use error::{Error, Result};
