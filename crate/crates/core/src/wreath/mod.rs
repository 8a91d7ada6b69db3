//! Exact arithmetic on automorphisms of the rooted `d`-ary tree given by
//! finite wreath recursions.
//!
//! Convention: right action. The product `g·h` means "apply `g`, then
//! `h`", so `(g_1..g_d)σ · (h_1..h_d)τ = (g_1 h_{σ(1)}, …, g_d h_{σ(d)}) στ`,
//! commutators are `[x, y] = x⁻¹y⁻¹xy` and conjugates `x^g = g⁻¹xg`.

mod element;
mod machine;
mod portrait;
mod vertex;

pub use element::{Element, DEFAULT_STATE_CAP, MAX_TRUNCATION_POINTS};
pub use machine::{MachineState, MealyMachine};
pub use portrait::{Portrait, PortraitNode};
pub use vertex::Vertex;
