//! Polynomial-size representations of `{X : f(X) = k}` for integer-valued
//! symmetric submodular ("connectivity") functions, with a cardinality
//! constrained search built on top.

pub mod bisection;
pub mod blocking;
pub mod dagenc;
pub mod digraph;
pub mod encoder;
pub mod error;
pub mod ground;
pub mod interpolation;
pub mod mutation;
pub mod oracles;
pub mod verify;

pub use error::{Error, Result};
pub use ground::{DisjointPair, GroundSet, SubsetMask};
