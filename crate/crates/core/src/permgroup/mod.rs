//! Deterministic permutation-group engine: Schreier–Sims with exact
//! big-integer orders, membership, normal closures, commutator subgroups,
//! lower central series, pointwise stabilizers by base change, and indices.

mod group;
mod layout;
mod ops;
mod serial;

pub use group::{Enumeration, Origin, PermGroup};
pub(crate) use ops::normal_closure_by;
pub use layout::{Cell, Layout};
pub use num_bigint::BigUint as BigCount;
pub use ops::{
    commutator_seeds, commutator_subgroup, index, is_subgroup, join, lower_central_series,
    normal_closure, pointwise_stabilizer, same_group,
};
