//! Essential paths on ADE graphs and the weak bialgebra of graded
//! endomorphisms built on them.

pub mod a2;
pub mod algebra;
pub mod cache;
pub mod checks;
pub mod endo;
pub mod error;
pub mod essential;
pub mod graph;
pub mod linalg;
pub mod parallel;
pub mod path;
pub mod report;
pub mod serial;

pub use error::{Error, Result};
pub use essential::{EssentialSpace, SpaceOptions};
pub use graph::{Graph, PerronData};
pub use parallel::Parallelism;
pub use path::{ElementaryPath, PathVector};
