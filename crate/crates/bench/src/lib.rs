//! Shared setup for the benchmarks: the shipped group definitions.

use std::path::Path;

use arbor::dsl::{parse, resolve, parse_subgroup, SubgroupExpr};
use arbor::filtration::{Caps, Tower};

/// A fresh, uncached tower for a file in `groups/`.
pub fn tower(name: &str) -> Tower {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../groups").join(name);
    let text = std::fs::read_to_string(&path).expect("shipped group file");
    let defn = parse(&text).expect("shipped group parses");
    Tower::new(resolve(&defn).expect("shipped group resolves"), Caps::default())
}

pub fn subgroup(t: &Tower, text: &str) -> SubgroupExpr {
    parse_subgroup(text, &t.resolved().definition).expect("subgroup parses")
}
