//! Exact Lin-Lu-Yau Ricci curvature on finite simple graphs.
//!
//! The crate computes curvature through an exact rational transportation
//! solver, checks the local structures that flat edges must have, ships a
//! catalog of named graphs and searches for Ricci-flat graphs of girth four
//! whose 4-cycles are vertex-disjoint.
//!
//! ```
//! use ricciflat::{atlas, curvature};
//!
//! let petersen = atlas::named_graph("petersen", None).unwrap().graph;
//! assert!(curvature::is_ricci_flat(&petersen).unwrap().is_ricci_flat);
//! ```

pub mod atlas;
pub mod canon;
pub mod curvature;
pub mod cycles;
pub mod format;
pub mod graph;
pub mod local;
pub mod rational;
pub mod search;
pub mod transport;

pub use graph::{Graph, GraphError};
pub use rational::Rational;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/transport.md")]
    mod transport {}
    #[doc = include_str!("../../../book/src/curvature.md")]
    mod curvature {}
    #[doc = include_str!("../../../book/src/local-structure.md")]
    mod local_structure {}
    #[doc = include_str!("../../../book/src/atlas.md")]
    mod atlas {}
    #[doc = include_str!("../../../book/src/search.md")]
    mod search {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
