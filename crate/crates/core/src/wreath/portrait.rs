use std::fmt::Write as _;

use crate::error::Result;
use crate::perm::Permutation;
use crate::wreath::element::Element;
use crate::wreath::vertex::Vertex;

#[derive(Clone, Debug)]
pub struct PortraitNode {
    pub vertex: Vertex,
    pub perm: Permutation,
    pub section: Element,
}

/// Root permutations of all sections down to a fixed depth, in
/// breadth-first order. Sections at the bottom level are kept so callers can
/// name them.
#[derive(Clone, Debug)]
pub struct Portrait {
    pub depth: usize,
    pub nodes: Vec<PortraitNode>,
}

impl Portrait {
    pub fn of(g: &Element, depth: usize) -> Result<Portrait> {
        let d = g.degree();
        let mut nodes = Vec::new();
        for level in 0..=depth {
            for v in Vertex::level_vertices(d, level) {
                let section = g.section(&v)?;
                nodes.push(PortraitNode {
                    perm: section.root_perm().clone(),
                    vertex: v,
                    section,
                });
            }
        }
        Ok(Portrait { depth, nodes })
    }

    /// One line per vertex: `<vertex> perm=<cycles>`; the leaves of the
    /// portrait also carry ` section=<name>` when `namer` recognizes the
    /// section.
    pub fn render(&self, namer: impl Fn(&Element) -> Option<String>) -> String {
        let mut out = String::new();
        for node in &self.nodes {
            let _ = write!(out, "{} perm={}", node.vertex, node.perm);
            if node.vertex.level() == self.depth {
                match namer(&node.section) {
                    Some(name) => {
                        let _ = write!(out, " section={name}");
                    }
                    None if node.section.is_identity() => out.push_str(" section=1"),
                    None => {
                        let _ = write!(out, " section=<{} states>", node.section.state_count());
                    }
                }
            }
            out.push('\n');
        }
        out
    }
}
