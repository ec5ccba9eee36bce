//! Finite automata realizing the affine groups `Z^d ⋊ Γ` as automorphisms of
//! the `n^d`-ary rooted tree, with exact tools for computing in them.

pub mod automaton;
pub mod cli;
pub mod constructions;
pub mod error;
pub mod linalg;
pub mod nadic;
pub mod treeaction;

pub use error::{Error, Result};
