use std::fmt;

use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::wreath::Vertex;

/// Block hierarchy on the point set: the `arity^depth` points are the leaves
/// of the `arity`-ary tree of the given depth. A plain permutation group on
/// `N` points uses the flat layout (`arity = N`, `depth = 1`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Layout {
    arity: usize,
    depth: usize,
}

/// A vertex of the layout tree (levels `1..=depth`), used as a base point.
/// Its image under a permutation is the block containing the image of its
/// first leaf.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Cell {
    pub level: usize,
    pub index: usize,
}

impl Layout {
    pub fn flat(points: usize) -> Self {
        Layout {
            arity: points.max(1),
            depth: 1,
        }
    }

    pub fn tree(arity: usize, depth: usize) -> Self {
        Layout { arity, depth }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn points(&self) -> usize {
        self.arity.pow(self.depth as u32)
    }

    pub fn block_size(&self, level: usize) -> usize {
        self.arity.pow((self.depth - level) as u32)
    }

    pub(crate) fn first_leaf(&self, cell: Cell) -> usize {
        cell.index * self.block_size(cell.level)
    }

    pub fn cell_of(&self, v: &Vertex) -> Cell {
        Cell {
            level: v.level(),
            index: v.index(self.arity),
        }
    }

    pub fn vertex_of(&self, cell: Cell) -> Vertex {
        Vertex::from_index(self.arity, cell.level, cell.index)
    }

    /// Children `1..arity-1` of every vertex above the leaves, breadth
    /// first. Their pointwise stabilizer in the automorphism group of the
    /// layout tree is trivial, and each one's parent precedes it.
    pub fn full_base(&self) -> Vec<Cell> {
        let mut out = Vec::with_capacity(self.points().saturating_sub(1));
        for level in 1..=self.depth {
            let parents = self.arity.pow(level as u32 - 1);
            for p in 0..parents {
                for c in 0..self.arity - 1 {
                    out.push(Cell {
                        level,
                        index: p * self.arity + c,
                    });
                }
            }
        }
        out
    }

    /// Checks that `perm` maps blocks of every level onto blocks.
    pub fn check(&self, perm: &Permutation) -> Result<()> {
        if perm.degree() != self.points() {
            return Err(Error::DegreeMismatch {
                expected: self.points(),
                found: perm.degree(),
            });
        }
        for level in 1..self.depth {
            let bs = self.block_size(level);
            for x in 0..perm.degree() {
                let first = x - x % bs;
                if perm.image(x) / bs != perm.image(first) / bs {
                    return Err(Error::NotTreeAutomorphism {
                        arity: self.arity,
                        depth: self.depth,
                    });
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.arity, self.depth)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_base_sizes() {
        assert_eq!(Layout::tree(2, 10).full_base().len(), 1023);
        assert_eq!(Layout::tree(5, 4).full_base().len(), 624);
        assert_eq!(Layout::flat(3).full_base().len(), 2);
        assert!(Layout::tree(3, 0).full_base().is_empty());
    }

    #[test]
    fn block_check() {
        let l = Layout::tree(2, 2);
        assert!(l.check(&Permutation::parse_cycles(4, "(1 3)(2 4)").unwrap()).is_ok());
        assert!(l.check(&Permutation::parse_cycles(4, "(2 3)").unwrap()).is_err());
    }
}
