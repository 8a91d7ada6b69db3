use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::permgroup::group::{Origin, PermGroup};
use crate::permgroup::layout::{Cell, Layout};

fn check_inside(ambient: &PermGroup, perms: &[Permutation], what: &str) -> Result<()> {
    for (i, x) in perms.iter().enumerate() {
        if x.degree() != ambient.degree() {
            return Err(Error::DegreeMismatch {
                expected: ambient.degree(),
                found: x.degree(),
            });
        }
        if !ambient.contains_unchecked(x) {
            return Err(Error::NotInAmbient {
                what: format!("{what} {i}"),
            });
        }
    }
    Ok(())
}

/// Smallest subgroup containing `seeds` and closed under conjugation by the
/// generators of `ambient`. Generator origins record the conjugation
/// history, so callers can rebuild each generator as a word.
pub fn normal_closure(ambient: &PermGroup, seeds: &[Permutation]) -> Result<PermGroup> {
    check_inside(ambient, seeds, "seed")?;
    Ok(normal_closure_by(ambient.layout(), ambient.generators(), seeds))
}

/// Normal closure under conjugation by `conjugators`, which callers
/// guarantee generate a group containing the seeds.
pub(crate) fn normal_closure_by(
    layout: Layout,
    conjugators: &[Permutation],
    seeds: &[Permutation],
) -> PermGroup {
    let mut n = PermGroup::trivial_on(layout);
    for (i, s) in seeds.iter().enumerate() {
        n.extend_with(s, Origin::Seed(i), None);
    }
    let mut k = 0;
    while k < n.generators().len() {
        for (j, x) in conjugators.iter().enumerate() {
            let c = n.generators()[k].conjugate_by(x);
            if !n.contains_unchecked(&c) {
                n.extend_with(&c, Origin::Conjugate { of: k, by: j }, None);
            }
        }
        k += 1;
    }
    n.set_normal_generators(seeds.iter().filter(|s| !s.is_identity()).cloned().collect());
    n
}

/// Commutators `[a, b]` for `a` among the normal generators of `a_group`
/// (its generators if it has none) and `b` among the generators of
/// `b_group`, with their indices; trivial ones are dropped.
pub fn commutator_seeds(a_group: &PermGroup, b_group: &PermGroup) -> Vec<(Permutation, usize, usize)> {
    let left = a_group.normal_generators().unwrap_or(a_group.generators());
    let mut out: Vec<(Permutation, usize, usize)> = Vec::new();
    for (i, a) in left.iter().enumerate() {
        for (j, b) in b_group.generators().iter().enumerate() {
            let c = a.commutator(b);
            if !c.is_identity() && !out.iter().any(|(x, _, _)| *x == c) {
                out.push((c, i, j));
            }
        }
    }
    out
}

/// Normal closure in `ambient` of the commutators of the generators of `a`
/// and `b`; this is `[a, b]` whenever both are normal in `ambient`.
pub fn commutator_subgroup(ambient: &PermGroup, a: &PermGroup, b: &PermGroup) -> Result<PermGroup> {
    check_inside(ambient, a.generators(), "generator of the first argument")?;
    check_inside(ambient, b.generators(), "generator of the second argument")?;
    let seeds: Vec<Permutation> = commutator_seeds(a, b).into_iter().map(|(c, _, _)| c).collect();
    normal_closure(ambient, &seeds)
}

/// `γ_1 = ambient`, `γ_{i+1} = [γ_i, ambient]`, returned as `γ_1..γ_k`.
pub fn lower_central_series(ambient: &PermGroup, k: usize) -> Result<Vec<PermGroup>> {
    if k == 0 {
        return Err(Error::GammaIndexZero);
    }
    let mut first = ambient.clone();
    first.set_normal_generators(ambient.generators().to_vec());
    let mut out = vec![first];
    while out.len() < k {
        let last = out.last().expect("nonempty");
        if out.len() >= 2 && last.order() == out[out.len() - 2].order() {
            out.push(last.clone());
            continue;
        }
        let next = commutator_subgroup(ambient, last, ambient)?;
        out.push(next);
    }
    Ok(out)
}

/// Subgroup fixing each listed point (1-based).
pub fn pointwise_stabilizer(g: &PermGroup, points: &[usize]) -> Result<PermGroup> {
    let n = g.degree();
    let layout = g.layout();
    let depth = layout.depth();
    let mut cells = Vec::with_capacity(points.len());
    for &p in points {
        if p == 0 || p > n {
            return Err(Error::PointOutOfRange { point: p, degree: n });
        }
        cells.push(Cell {
            level: depth,
            index: p - 1,
        });
    }
    Ok(g.cell_stabilizer(&cells))
}

/// `|G : H|`, after checking that every generator of `H` lies in `G`.
pub fn index(g: &PermGroup, h: &PermGroup) -> Result<BigUint> {
    for (i, x) in h.generators().iter().enumerate() {
        if !g.contains(x)? {
            return Err(Error::NotASubgroup { index: i });
        }
    }
    Ok(g.order() / h.order())
}

/// `⟨gens(G) ∪ gens(H)⟩`.
pub fn join(g: &PermGroup, h: &PermGroup) -> Result<PermGroup> {
    if g.layout() != h.layout() {
        return Err(Error::DegreeMismatch {
            expected: g.degree(),
            found: h.degree(),
        });
    }
    let mut out = g.clone();
    for x in h.generators() {
        out.extend(x)?;
    }
    Ok(out)
}

/// Whether every generator of `h` lies in `g`.
pub fn is_subgroup(g: &PermGroup, h: &PermGroup) -> Result<bool> {
    for x in h.generators() {
        if !g.contains(x)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Equality by mutual generator membership.
pub fn same_group(g: &PermGroup, h: &PermGroup) -> Result<bool> {
    Ok(g.order() == h.order() && is_subgroup(g, h)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permgroup::group::Enumeration;

    fn p(n: usize, s: &str) -> Permutation {
        Permutation::parse_cycles(n, s).unwrap()
    }

    fn s3() -> PermGroup {
        PermGroup::build(&[p(3, "(1 2)"), p(3, "(1 2 3)")], 3).unwrap()
    }

    #[test]
    fn closures_in_s3() {
        let g = s3();
        assert_eq!(normal_closure(&g, &[p(3, "(1 2 3)")]).unwrap().order(), 3u32.into());
        assert_eq!(normal_closure(&g, &[p(3, "(1 2)")]).unwrap().order(), 6u32.into());
        assert!(normal_closure(&g, &[Permutation::identity(3)]).unwrap().is_trivial());
        let c = PermGroup::build(&[p(3, "(1 2 3)")], 3).unwrap();
        assert!(normal_closure(&c, &[p(3, "(1 2)")]).is_err());
    }

    #[test]
    fn derived_and_central_series() {
        let g = s3();
        assert_eq!(commutator_subgroup(&g, &g, &g).unwrap().order(), 3u32.into());
        let series = lower_central_series(&g, 3).unwrap();
        let orders: Vec<BigUint> = series.iter().map(PermGroup::order).collect();
        assert_eq!(orders, vec![6u32.into(), 3u32.into(), 3u32.into()]);
        let ab = PermGroup::build(&[p(4, "(1 2)"), p(4, "(3 4)")], 4).unwrap();
        assert!(commutator_subgroup(&ab, &ab, &ab).unwrap().is_trivial());
        assert!(lower_central_series(&g, 0).is_err());
    }

    #[test]
    fn stabilizers_and_index() {
        let g = s3();
        let st = pointwise_stabilizer(&g, &[3]).unwrap();
        assert_eq!(st.order(), 2u32.into());
        assert!(st.contains(&p(3, "(1 2)")).unwrap());
        assert!(pointwise_stabilizer(&g, &[1, 2, 3]).unwrap().is_trivial());
        assert!(pointwise_stabilizer(&g, &[4]).is_err());
        let a3 = PermGroup::build(&[p(3, "(1 2 3)")], 3).unwrap();
        assert_eq!(index(&g, &a3).unwrap(), 2u32.into());
        assert_eq!(index(&g, &g).unwrap(), 1u32.into());
        assert!(index(&a3, &g).is_err());
    }

    #[test]
    fn joins() {
        let t = PermGroup::build(&[p(3, "(1 2)")], 3).unwrap();
        let c = PermGroup::build(&[p(3, "(1 2 3)")], 3).unwrap();
        assert_eq!(join(&t, &c).unwrap().order(), 6u32.into());
        assert_eq!(join(&t, &PermGroup::trivial(3)).unwrap().order(), 2u32.into());
        match join(&t, &c).unwrap().enumerate(100) {
            Enumeration::Complete(v) => assert_eq!(v.len(), 6),
            Enumeration::Overflow => panic!(),
        }
    }
}
