//! Printer/parser round trips and fuzzing of the group-definition language.

use arbor::dsl::{parse, parse_element, parse_subgroup, resolve, ElementExpr, GroupDefinition, SubgroupExpr};
use arbor::filtration::{Caps, Tower};
use arbor::{Permutation, Vertex};
use proptest::prelude::*;

const BASILICA: &str = "tree degree 2\ngen a = (1, b)\ngen b = (1, a)@(1 2)\nsub A = ncl(a)\n";

fn basilica() -> GroupDefinition {
    parse(BASILICA).unwrap()
}

fn swap() -> Permutation {
    Permutation::parse_cycles(2, "(1 2)").unwrap()
}

fn element() -> impl Strategy<Value = ElementExpr> {
    let leaf = prop_oneof![
        Just(ElementExpr::One),
        Just(ElementExpr::id("a")),
        Just(ElementExpr::id("b")),
        Just(ElementExpr::Rooted(swap())),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(ElementExpr::Product),
            (inner.clone(), -5i64..6).prop_map(|(e, k)| ElementExpr::Power(Box::new(e), k)),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| x.commutator(y)),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| x.conjugate(y)),
            (inner.clone(), inner.clone(), any::<bool>())
                .prop_map(|(x, y, r)| ElementExpr::Tuple(vec![x, y], r.then(swap))),
        ]
    })
}

fn subgroup() -> impl Strategy<Value = SubgroupExpr> {
    let leaf = prop_oneof![
        Just(SubgroupExpr::Whole),
        Just(SubgroupExpr::Named("A".into())),
        (0usize..4).prop_map(SubgroupExpr::Stab),
        (1usize..3).prop_map(SubgroupExpr::RistLevel),
        prop::collection::vec(1usize..=2, 0..3).prop_map(|p| SubgroupExpr::Rist(Vertex::new(p))),
        prop::collection::vec(element(), 0..3).prop_map(SubgroupExpr::Gens),
        prop::collection::vec(element(), 1..3).prop_map(SubgroupExpr::NormalClosure),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|x| SubgroupExpr::Derived(Box::new(x))),
            (inner.clone(), 1usize..4).prop_map(|(x, i)| SubgroupExpr::Gamma(Box::new(x), i)),
            (inner.clone(), inner).prop_map(|(x, y)| SubgroupExpr::Join(Box::new(x), Box::new(y))),
        ]
    })
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config(2000))]

    #[test]
    fn element_printing_round_trips(e in element()) {
        let d = basilica();
        let printed = e.to_string();
        let back = parse_element(&printed, &d).unwrap();
        prop_assert_eq!(back.to_string(), printed);
        prop_assert_eq!(back, e);
    }

    #[test]
    fn subgroup_printing_round_trips(s in subgroup()) {
        let d = basilica();
        let printed = s.to_string();
        let back = parse_subgroup(&printed, &d).unwrap();
        prop_assert_eq!(back.to_string(), printed);
        prop_assert_eq!(back, s);
    }

    #[test]
    fn arbitrary_text_never_panics(text in any::<String>()) {
        let _ = parse(&text);
        let _ = parse(&format!("tree degree 2\n{text}"));
        let _ = parse_element(&text, &basilica());
    }

    #[test]
    fn token_soup_never_panics(text in "(tree|degree|gen|sub|ncl|gamma|[ab]|[0-9]{1,3}|[()\\[\\],*^@=-]|#|\n| ){0,40}") {
        let _ = parse(&text);
        let _ = parse(&format!("tree degree 3\n{text}"));
        let _ = parse_subgroup(&text, &basilica());
    }
}

proptest! {
    #![proptest_config(config(300))]

    #[test]
    fn evaluation_commutes_with_truncation(e in element()) {
        let d = basilica();
        let resolved = resolve(&d).unwrap();
        let automaton = resolved.eval(&e).unwrap();
        let tower = Tower::new(resolved, Caps::default());
        for n in [0, 3, 5] {
            prop_assert_eq!(automaton.truncate(n).unwrap(), tower.element_perm(&e, n).unwrap());
        }
    }
}

#[test]
fn definitions_round_trip_through_the_printer() {
    for file in ["basilica.grp", "ggs3.grp", "ggs5.grp"] {
        let text = std::fs::read_to_string(format!("{}/../../groups/{file}", env!("CARGO_MANIFEST_DIR"))).unwrap();
        let d = parse(&text).unwrap();
        let again = parse(&d.pretty_print()).unwrap();
        assert_eq!(again, d, "{file}");
        assert_eq!(again.content_hash(), d.content_hash());
    }
}

#[test]
fn comments_and_layout_do_not_change_the_hash() {
    let spaced = "# Basilica\ntree   degree 2\n\ngen a=(1,b)   # first\ngen b = (1, a) @ (1 2)\nsub A = ncl( a )\n";
    assert_eq!(parse(spaced).unwrap().content_hash(), basilica().content_hash());
}
