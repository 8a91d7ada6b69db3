use num_bigint::BigUint;

use crate::dsl::{ElementExpr, SubgroupExpr};
use crate::error::{Error, Result};
use crate::filtration::tower::Tower;
use crate::filtration::tree;
use crate::perm::Permutation;
use crate::permgroup::index;
use crate::wreath::Vertex;

impl Tower {
    /// Whether `g` lies in `N·st_G(n)`.
    pub fn coset_member(&self, g: &ElementExpr, sub: &SubgroupExpr, n: usize) -> Result<bool> {
        let p = self.element_perm(g, n)?;
        self.perm_member(&p, sub, n)
    }

    /// Whether a level-`n` permutation lies in the image of `sub`.
    pub fn perm_member(&self, p: &Permutation, sub: &SubgroupExpr, n: usize) -> Result<bool> {
        self.eval_subgroup(sub, n)?.group.contains(p)
    }

    /// `|G : N·st_G(n)|`.
    pub fn quotient_index(&self, sub: &SubgroupExpr, n: usize) -> Result<BigUint> {
        let g = self.level_quotient(n)?;
        let h = self.eval_subgroup(sub, n)?;
        index(&g.quotient, &h.group)
    }

    /// Whether every generator of `x` lies in `y`, both at level `n`.
    pub fn is_contained(&self, x: &SubgroupExpr, y: &SubgroupExpr, n: usize) -> Result<bool> {
        Ok(self.first_escape(x, y, n)?.is_none())
    }

    /// The first generator of `x` outside `y` at level `n`, described as a
    /// word when possible.
    pub fn first_escape(&self, x: &SubgroupExpr, y: &SubgroupExpr, n: usize) -> Result<Option<String>> {
        let a = self.eval_subgroup(x, n)?;
        let b = self.eval_subgroup(y, n)?;
        for (i, g) in a.group.generators().iter().enumerate() {
            if !b.group.contains(g)? {
                return Ok(Some(a.describe(i)));
            }
        }
        Ok(None)
    }

    /// Equality of images at level `n`, by mutual generator membership.
    pub fn subgroups_equal(&self, x: &SubgroupExpr, y: &SubgroupExpr, n: usize) -> Result<bool> {
        let a = self.eval_subgroup(x, n)?;
        let b = self.eval_subgroup(y, n)?;
        Ok(a.group.order() == b.group.order() && self.is_contained(x, y, n)?)
    }

    /// Nilpotency class of `G_n / N_n`, or `None` if the lower central
    /// series of `G_n` stops above `N_n`.
    pub fn quotient_class(&self, sub: &SubgroupExpr, n: usize) -> Result<Option<usize>> {
        let whole = Box::new(SubgroupExpr::Whole);
        let mut previous: Option<BigUint> = None;
        for i in 1.. {
            let gamma = SubgroupExpr::Gamma(whole.clone(), i);
            if self.is_contained(&gamma, sub, n)? {
                return Ok(Some(i - 1));
            }
            let order = self.eval_subgroup(&gamma, n)?.group.order();
            if previous.as_ref() == Some(&order) {
                return Ok(None);
            }
            previous = Some(order);
        }
        unreachable!()
    }

    /// Whether `g` fixes level 1 and each first-level section lies in
    /// `H·st_G(n - 1)`.
    pub fn pullback_member(&self, g: &ElementExpr, h: &SubgroupExpr, n: usize) -> Result<bool> {
        let p = self.element_perm(g, n)?;
        self.pullback_perm(&p, h, n)
    }

    /// [`Tower::pullback_member`] for a level-`n` permutation.
    pub fn pullback_perm(&self, p: &Permutation, h: &SubgroupExpr, n: usize) -> Result<bool> {
        if n == 0 {
            return Err(Error::Invalid("pullback membership needs level at least 1".into()));
        }
        let d = self.degree();
        if !tree::fixes_level(p, d, n, 1) {
            return Ok(false);
        }
        let target = self.eval_subgroup(h, n - 1)?;
        for x in 0..d {
            if !target.group.contains(&tree::restrict(p, d, n, x))? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn fixed_sections(&self, g: &ElementExpr, n: usize) -> Result<Vec<Permutation>> {
        if n == 0 {
            return Err(Error::Invalid("sections need level at least 1".into()));
        }
        let d = self.degree();
        let p = self.element_perm(g, n)?;
        if !tree::fixes_level(&p, d, n, 1) {
            return Err(Error::MovesFirstLevel);
        }
        Ok((0..d).map(|x| tree::restrict(&p, d, n, x)).collect())
    }

    /// For each coordinate `i` (1-based), whether the section of `g` at `i`
    /// lies in `H·st_G(n - 1)`.
    pub fn section_coset_profile(
        &self,
        g: &ElementExpr,
        h: &SubgroupExpr,
        coords: &[usize],
        n: usize,
    ) -> Result<Vec<bool>> {
        let d = self.degree();
        let sections = self.fixed_sections(g, n)?;
        let target = self.eval_subgroup(h, n - 1)?;
        coords
            .iter()
            .map(|&i| {
                if i == 0 || i > d {
                    return Err(Error::VertexOutOfRange { entry: i, degree: d });
                }
                target.group.contains(&sections[i - 1])
            })
            .collect()
    }

    /// For a binary tree, whether the product of the two sections of `g`
    /// lies in `H·st_G(n - 1)`.
    pub fn sections_product_check(&self, g: &ElementExpr, h: &SubgroupExpr, n: usize) -> Result<bool> {
        let d = self.degree();
        if d != 2 {
            return Err(Error::NotBinary(d));
        }
        let sections = self.fixed_sections(g, n)?;
        let target = self.eval_subgroup(h, n - 1)?;
        target.group.contains(&sections[0].then(&sections[1]))
    }

    /// Whether the element acting as `h` below `v` and trivially elsewhere
    /// lies in the image of `target` at level `n`; `h` acts on level
    /// `n - |v|`.
    pub fn embedded_member(
        &self,
        h: &Permutation,
        v: &Vertex,
        target: &SubgroupExpr,
        n: usize,
    ) -> Result<bool> {
        let d = self.degree();
        v.check(d)?;
        if v.level() > n || h.degree() != d.pow((n - v.level()) as u32) {
            return Err(Error::DegreeMismatch {
                expected: d.pow(n.saturating_sub(v.level()) as u32),
                found: h.degree(),
            });
        }
        self.perm_member(&tree::embed(h, v, d, n), target, n)
    }
}
