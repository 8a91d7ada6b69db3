//! Text serialization of a base and strong generating set.
//!
//! ```text
//! bsgs 1
//! layout <arity> <depth>
//! order <decimal>
//! chain <level>:<index> ...
//! generators <k>
//! <cycles>            (k lines)
//! strong <m>
//! <cycles>            (m lines)
//! ```

use std::fmt::Write as _;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::permgroup::group::PermGroup;
use crate::permgroup::layout::{Cell, Layout};

const VERSION: u32 = 1;

impl PermGroup {
    pub fn to_bsgs_text(&self) -> String {
        let layout = self.layout();
        let mut out = String::new();
        let _ = writeln!(out, "bsgs {VERSION}");
        let _ = writeln!(out, "layout {} {}", layout.arity(), layout.depth());
        let _ = writeln!(out, "order {}", self.order());
        let cells: Vec<String> = self
            .chain_cells()
            .iter()
            .map(|c| format!("{}:{}", c.level, c.index))
            .collect();
        let _ = writeln!(out, "chain {}", cells.join(" "));
        let _ = writeln!(out, "generators {}", self.generators().len());
        for g in self.generators() {
            let _ = writeln!(out, "{g}");
        }
        let _ = writeln!(out, "strong {}", self.strong_generators().len());
        for s in self.strong_generators() {
            let _ = writeln!(out, "{s}");
        }
        out
    }

    pub fn from_bsgs_text(text: &str) -> Result<PermGroup> {
        let bad = |what: &str| Error::Invalid(format!("malformed BSGS text: {what}"));
        let mut lines = text.lines();
        fn next_field<'a>(lines: &mut impl Iterator<Item = &'a str>, name: &str) -> Result<String> {
            let line = lines
                .next()
                .ok_or_else(|| Error::Invalid(format!("malformed BSGS text: missing {name}")))?;
            let rest = line
                .strip_prefix(name)
                .ok_or_else(|| Error::Invalid(format!("malformed BSGS text: expected {name}")))?;
            Ok(rest.trim().to_string())
        }
        let mut field = |name: &str| next_field(&mut lines, name);
        if field("bsgs")? != VERSION.to_string() {
            return Err(bad("unsupported version"));
        }
        let layout = field("layout")?;
        let (a, d) = layout.split_once(' ').ok_or_else(|| bad("layout"))?;
        let arity: usize = a.parse().map_err(|_| bad("layout"))?;
        let depth: usize = d.parse().map_err(|_| bad("layout"))?;
        if arity == 0 || (arity as f64).powi(depth as i32) > 1e8 {
            return Err(bad("layout"));
        }
        let layout = Layout::tree(arity, depth);
        let order: BigUint = field("order")?.parse().map_err(|_| bad("order"))?;
        let chain = field("chain")?
            .split_whitespace()
            .map(|c| {
                let (l, i) = c.split_once(':').ok_or_else(|| bad("chain"))?;
                let level: usize = l.parse().map_err(|_| bad("chain"))?;
                let index: usize = i.parse().map_err(|_| bad("chain"))?;
                if level == 0 || level > depth || index >= arity.pow(level as u32) {
                    return Err(bad("chain"));
                }
                Ok(Cell { level, index })
            })
            .collect::<Result<Vec<_>>>()?;
        let n = layout.points();
        let mut perms = |name: &str| -> Result<Vec<Permutation>> {
            let k: usize = next_field(&mut lines, name)?.parse().map_err(|_| bad(name))?;
            (0..k)
                .map(|_| {
                    let line = lines.next().ok_or_else(|| bad(name))?;
                    Permutation::parse_cycles(n, line)
                })
                .collect()
        };
        let generators = perms("generators")?;
        let strong = perms("strong")?;
        let g = PermGroup::from_parts(layout, chain, generators, strong)?;
        if g.order() != order {
            return Err(bad("order does not match the strong generators"));
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let gens = [
            Permutation::parse_cycles(8, "(1 5)(2 6)(3 7)(4 8)").unwrap(),
            Permutation::parse_cycles(8, "(1 2)").unwrap(),
        ];
        let g = PermGroup::build_on(Layout::tree(2, 3), &gens).unwrap();
        let text = g.to_bsgs_text();
        let back = PermGroup::from_bsgs_text(&text).unwrap();
        assert_eq!(back.to_bsgs_text(), text);
        assert_eq!(back.base(), g.base());
        assert_eq!(back.strong_generators(), g.strong_generators());
    }

    #[test]
    fn rejects_garbage() {
        assert!(PermGroup::from_bsgs_text("").is_err());
        assert!(PermGroup::from_bsgs_text("bsgs 2\n").is_err());
        assert!(PermGroup::from_bsgs_text("bsgs 1\nlayout 2 2\norder 5\nchain 1:0 2:0 2:2\ngenerators 0\nstrong 0\n").is_err());
    }
}
