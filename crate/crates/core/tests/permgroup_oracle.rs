//! The Schreier–Sims engine against breadth-first enumeration.

use std::collections::HashSet;

use arbor::permgroup::{
    commutator_subgroup, index, lower_central_series, normal_closure, pointwise_stabilizer,
    Enumeration,
};
use arbor::{Layout, PermGroup, Permutation};
use proptest::prelude::*;

fn closure(gens: &[Permutation], degree: usize) -> HashSet<Permutation> {
    let id = Permutation::identity(degree);
    let mut seen = HashSet::from([id.clone()]);
    let mut frontier = vec![id];
    while let Some(x) = frontier.pop() {
        for g in gens {
            let y = x.then(g);
            if seen.insert(y.clone()) {
                frontier.push(y);
            }
        }
    }
    seen
}

fn normal_closure_bfs(ambient: &HashSet<Permutation>, seeds: &[Permutation], degree: usize) -> HashSet<Permutation> {
    let conjugates: Vec<Permutation> = ambient
        .iter()
        .flat_map(|g| seeds.iter().map(move |s| s.conjugate_by(g)))
        .collect::<HashSet<_>>()
        .into_iter()
        .collect();
    closure(&conjugates, degree)
}

fn perm_strategy(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n as u32).collect::<Vec<u32>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::from_images(v).unwrap())
}

fn gens_strategy() -> impl Strategy<Value = (usize, Vec<Permutation>)> {
    (2usize..=7).prop_flat_map(|n| (Just(n), prop::collection::vec(perm_strategy(n), 0..4)))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 300, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn order_and_membership_match_enumeration((n, gens) in gens_strategy(), probes in prop::collection::vec(any::<u64>(), 20)) {
        let g = PermGroup::build(&gens, n).unwrap();
        let elements = closure(&gens, n);
        prop_assert_eq!(g.order(), elements.len().into());
        let all: Vec<Permutation> = closure(&[
            Permutation::from_cycles(n, &[vec![1, 2]]).unwrap(),
            Permutation::from_cycles(n, &[(1..=n).collect()]).unwrap(),
        ], n).into_iter().collect();
        for p in probes {
            let x = &all[(p % all.len() as u64) as usize];
            prop_assert_eq!(g.contains(x).unwrap(), elements.contains(x));
        }
        match g.enumerate(10_000) {
            Enumeration::Complete(v) => {
                let listed: HashSet<Permutation> = v.into_iter().collect();
                prop_assert_eq!(listed, elements);
            }
            Enumeration::Overflow => prop_assert!(false, "S_7 has 5040 elements"),
        }
    }

    #[test]
    fn closures_match_enumeration((n, gens) in gens_strategy(), seed in 0usize..4) {
        let g = PermGroup::build(&gens, n).unwrap();
        let elements = closure(&gens, n);
        if elements.len() > 720 {
            return Ok(());
        }
        let seeds: Vec<Permutation> = gens.iter().skip(seed % gens.len().max(1)).take(1).cloned().collect();
        let ncl = normal_closure(&g, &seeds).unwrap();
        prop_assert_eq!(ncl.order(), normal_closure_bfs(&elements, &seeds, n).len().into());
        if elements.len() > 120 {
            return Ok(());
        }
        let derived = commutator_subgroup(&g, &g, &g).unwrap();
        let commutators: Vec<Permutation> = elements
            .iter()
            .flat_map(|x| elements.iter().map(move |y| x.commutator(y)))
            .collect::<HashSet<_>>()
            .into_iter()
            .collect();
        prop_assert_eq!(derived.order(), closure(&commutators, n).len().into());
    }

    #[test]
    fn stabilizers_match_enumeration((n, gens) in gens_strategy(), points in prop::collection::vec(1usize..=7, 1..3)) {
        let g = PermGroup::build(&gens, n).unwrap();
        let points: Vec<usize> = points.into_iter().map(|p| (p - 1) % n + 1).collect();
        let st = pointwise_stabilizer(&g, &points).unwrap();
        let expected = closure(&gens, n)
            .into_iter()
            .filter(|x| points.iter().all(|&p| x.image(p - 1) == p - 1))
            .count();
        prop_assert_eq!(st.order(), expected.into());
        prop_assert_eq!(index(&g, &st).unwrap() * st.order(), g.order());
    }

    #[test]
    fn serialization_round_trips((n, gens) in gens_strategy()) {
        let g = PermGroup::build(&gens, n).unwrap();
        let back = PermGroup::from_bsgs_text(&g.to_bsgs_text()).unwrap();
        prop_assert_eq!(back.order(), g.order());
        prop_assert_eq!(back.generators(), g.generators());
        prop_assert_eq!(back.to_bsgs_text(), g.to_bsgs_text());
    }
}

#[test]
fn tree_layout_wreath_products() {
    // The Sylow 2-subgroup of S_8 is Aut of the depth-3 binary tree.
    let layout = Layout::tree(2, 3);
    let gens = [
        Permutation::parse_cycles(8, "(1 5)(2 6)(3 7)(4 8)").unwrap(),
        Permutation::parse_cycles(8, "(1 3)(2 4)").unwrap(),
        Permutation::parse_cycles(8, "(1 2)").unwrap(),
    ];
    let g = PermGroup::build_on(layout, &gens).unwrap();
    assert_eq!(g.order(), closure(&gens, 8).len().into());
    assert_eq!(g.order(), 128u32.into());
    let not_tree = Permutation::parse_cycles(8, "(1 3)").unwrap();
    assert!(PermGroup::build_on(layout, &[not_tree]).is_err());
}

#[test]
fn central_series_of_the_dihedral_group_of_order_16() {
    let r = Permutation::parse_cycles(8, "(1 2 3 4 5 6 7 8)").unwrap();
    let s = Permutation::parse_cycles(8, "(2 8)(3 7)(4 6)").unwrap();
    let g = PermGroup::build(&[r, s], 8).unwrap();
    let orders: Vec<u32> = lower_central_series(&g, 5)
        .unwrap()
        .iter()
        .map(|x| x.order().try_into().unwrap())
        .collect();
    assert_eq!(orders, vec![16, 4, 2, 1, 1]);
}
