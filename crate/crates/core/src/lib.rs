//! Exact computation with groups of rooted-tree automorphisms defined by
//! finite wreath recursions, and with their finite level quotients.

pub mod dsl;
pub mod error;
pub mod filtration;
pub mod perm;
pub mod permgroup;
pub mod wreath;

pub use error::{Error, Pos, Result};
pub use perm::Permutation;
pub use permgroup::{BigCount, Layout, PermGroup};
pub use wreath::{Element, MealyMachine, Vertex};
