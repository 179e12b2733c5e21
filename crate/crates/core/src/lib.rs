//! Computational toolkit for polynomial equation transformations and their
//! monodromy: Tschirnhaus maps and the Bring-Jerrard reduction, numerical
//! root continuation along parameter loops, monodromy and inertia groups,
//! the group-invariant form with its coincidence-subspace vanishing tests,
//! and permutation-chain lower bounds on resolvent parameter counts.
//!
//! Everything is a pure function of immutable values; identical exact
//! (rational) inputs give bit-identical outputs, and all randomness flows
//! from explicit seeds.

pub mod error;
pub mod scalar;
pub mod poly;
pub mod roots;
pub mod perm;
pub mod transform;
pub mod monodromy;
pub mod forms;
pub mod json;

pub use error::{Error, Result};
pub use perm::{PermGroup, Permutation, SetPartition};
pub use poly::Polynomial;
pub use roots::RootSet;
