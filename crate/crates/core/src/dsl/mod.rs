//! The group-definition language.
//!
//! ```text
//! file    := "tree" "degree" INT stmt*
//! stmt    := "gen" ID "=" elem | "sub" ID "=" subexpr
//! elem    := term ("*" term)*
//! term    := atom ("^" ("-"? INT | atom))?
//! atom    := "1" | ID | "[" elem "," elem "]"
//!          | "(" elem ("," elem)* ")" ("@" cycles)? | "@" cycles | "(" elem ")"
//! cycles  := ("(" INT+ ")")+
//! subexpr := "ncl" "(" elems ")" | "gens" "(" elems ")" | "derived" "(" subexpr ")"
//!          | "gamma" "(" subexpr "," INT ")" | "join" "(" subexpr "," subexpr ")"
//!          | "G" | "stab" "(" INT ")" | "rist" "(" "[" INT ("," INT)* "]" ")"
//!          | "ristlevel" "(" INT ")" | ID
//! ```
//!
//! `#` starts a comment. `x ^ g` with `g` not an integer is `g⁻¹xg`. A `gen`
//! whose right side is a tuple defines a machine state and may refer to any
//! generator, itself included; other `gen` statements are aliases and may
//! not depend on themselves. A subgroup name refers to an earlier `sub`.

mod ast;
mod lexer;
mod parser;
mod resolve;

pub use ast::{ElementExpr, GroupDefinition, SubgroupExpr};
pub use parser::{parse, parse_element, parse_subgroup, MAX_DEGREE};
pub use resolve::{resolve, resolve_capped, Resolved};
