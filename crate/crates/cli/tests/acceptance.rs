//! Acceptance gate: every criterion at its stated tolerance, one verdict
//! line each.
//!
//! Two criteria are not attainable as stated; they are still computed
//! literally and reported as FAIL together with what does hold. The run
//! succeeds when every other criterion passes and the known failures fail
//! for the documented reason. A known failure that starts passing also
//! fails the run, so the list cannot go stale.

use std::collections::HashSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use arbor::dsl::{parse, parse_element, parse_subgroup, ElementExpr, SubgroupExpr};
use arbor::filtration::{tree, Caps, Tower, Verdict};
use arbor::wreath::{MachineState, MealyMachine};
use arbor::{BigCount, Element, Permutation, Vertex};
use arbor_cli::{load_tower, Runner, Suite};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria whose literal statement does not hold, with the reason.
const KNOWN_UNATTAINABLE: [(usize, &str); 2] = [
    (
        1,
        "G/st(1) is cyclic of order p, so the image of K' at level 1 has index at most p, not p^2; \
         the orders p^(n+1) hold from level 2 on",
    ),
    (
        2,
        "st(n)K' and gamma_n(G)K' differ at every level; the identity that holds is \
         st(n)K' = gamma_(n+1)(G)K' (for n >= 2 at every tested level, for n = 1 at level 1)",
    ),
];

struct Outcome {
    pass: bool,
    detail: String,
}

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn tower(name: &str) -> Tower {
    load_tower(&root().join("groups").join(name), Caps::default(), None).expect("shipped group loads")
}

fn el(t: &Tower, text: &str) -> ElementExpr {
    parse_element(text, &t.resolved().definition).unwrap()
}

fn sub(t: &Tower, text: &str) -> SubgroupExpr {
    parse_subgroup(text, &t.resolved().definition).unwrap()
}

fn big(x: u64) -> BigCount {
    BigCount::from(x)
}

/// Collects failures of named sub-claims.
#[derive(Default)]
struct Tally {
    failures: Vec<String>,
    checked: usize,
}

impl Tally {
    fn claim(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn outcome(self, summary: String) -> Outcome {
        let pass = self.failures.is_empty();
        let detail = if pass {
            format!("{summary}; {} sub-claims", self.checked)
        } else {
            format!("{summary}; failing: {}", self.failures.join("; "))
        };
        Outcome { pass, detail }
    }
}

fn within(t: Duration, limit_s: u64) -> bool {
    t <= Duration::from_secs(limit_s)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut tally = Tally::default();
    for (file, p, levels) in [("ggs3.grp", 3u64, 1..=5usize), ("ggs5.grp", 5, 1..=3)] {
        let t = tower(file);
        let k = sub(&t, "Kprime");
        for n in levels {
            let got = t.quotient_index(&k, n).unwrap();
            let want = big(p).pow(n as u32 + 1);
            tally.claim(got == want, || format!("p={p} n={n}: index {got}, expected {want}"));
        }
    }
    let t = tower("ggs3.grp");
    let k = sub(&t, "Kprime");
    for n in 1..=4 {
        let class = t.quotient_class(&k, n).unwrap();
        tally.claim(class == Some(n), || format!("class at n={n} is {class:?}"));
    }
    let elapsed = start.elapsed();
    tally.claim(within(elapsed, 60), || format!("took {elapsed:?}"));
    tally.outcome(format!("maximal-class orders and classes in {:.1?}", elapsed))
}

fn criterion_2() -> Outcome {
    let t = tower("ggs3.grp");
    let kp = "Kprime";
    let cap = 6;
    let mut tally = Tally::default();
    let mut shifted = Vec::new();
    for n in 1..=4usize {
        for m in n..=(n + 2).min(cap) {
            let gamma = sub(&t, &format!("join(gamma(G, {n}), {kp})"));
            let stab = sub(&t, &format!("join(stab({n}), {kp})"));
            let equal = t.subgroups_equal(&gamma, &stab, m).unwrap();
            tally.claim(equal, || format!("n={n} m={m}"));
            let next = sub(&t, &format!("join(gamma(G, {}), {kp})", n + 1));
            if t.subgroups_equal(&next, &stab, m).unwrap() {
                shifted.push(format!("{n}@{m}"));
            }
        }
    }
    tally.outcome(format!(
        "literal identity over n<=4, m=n..n+2; shifted identity gamma_(n+1) holds at (n@m) {}",
        shifted.join(" ")
    ))
}

fn criterion_3() -> Outcome {
    let t = tower("basilica.grp");
    let r = t.resolved();
    let mut tally = Tally::default();
    let identities = [
        ("[a, b^-1]", "(b, b^-1)"),
        ("[[b, a], a]", "1"),
        ("[[a, b^-1], b]", "(b^-1 * (b^-1)^a, b^2)"),
    ];
    for (lhs, rhs) in identities {
        let start = Instant::now();
        let equal = r.eval(&el(&t, lhs)).unwrap().equal(&r.eval(&el(&t, rhs)).unwrap()).unwrap();
        let elapsed = start.elapsed();
        tally.claim(equal, || format!("{lhs} != {rhs}"));
        tally.claim(elapsed < Duration::from_secs(1), || format!("{lhs} took {elapsed:?}"));
    }
    let alpha = el(&t, "(b^2*[b,a], b^-2)");
    let beta = el(&t, "(b^-2, b^2*[b,a]^-1)");
    let gamma3 = sub(&t, "gamma3");
    for m in [4, 6, 8] {
        for (name, x) in [("alpha", &alpha), ("beta", &beta)] {
            tally.claim(t.coset_member(x, &gamma3, m).unwrap(), || format!("{name} not in gamma3 at {m}"));
            tally.claim(!t.pullback_member(x, &gamma3, m).unwrap(), || {
                format!("{name} in the pullback of gamma3 at {m}")
            });
            let profile = t.section_coset_profile(x, &gamma3, &[1, 2], m).unwrap();
            tally.claim(profile == [false, false], || format!("{name} profile {profile:?} at {m}"));
        }
        let joined = sub(&t, "join(gens((b^2*[b,a], b^-2), (b^-2, b^2*[b,a]^-1)), Gsecond)");
        tally.claim(t.subgroups_equal(&joined, &gamma3, m).unwrap(), || {
            format!("<alpha, beta>G'' != gamma3 at {m}")
        });
    }
    tally.outcome("automaton identities, alpha and beta against gamma3 at levels 4, 6, 8".into())
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let t = tower("basilica.grp");
    let gp = sub(&t, "Gprime");
    let a = sub(&t, "A");
    let mut tally = Tally::default();
    for n in 1..=4usize {
        let e = 1i64 << n;
        let b = el(&t, &format!("b^{e}"));
        let a_pow = el(&t, &format!("a^{e}"));
        tally.claim(t.coset_member(&b, &gp, 2 * n).unwrap(), || format!("b^{e} not in G'st({})", 2 * n));
        tally.claim(!t.coset_member(&b, &gp, 2 * n + 1).unwrap(), || {
            format!("b^{e} in G'st({})", 2 * n + 1)
        });
        tally.claim(!t.coset_member(&b, &a, 2 * n + 1).unwrap(), || format!("b^{e} in A st({})", 2 * n + 1));
        tally.claim(!t.coset_member(&a_pow, &gp, 2 * n + 2).unwrap(), || {
            format!("a^{e} in G'st({})", 2 * n + 2)
        });
    }
    let elapsed = start.elapsed();
    tally.claim(within(elapsed, 120), || format!("took {elapsed:?}"));
    tally.outcome(format!("ladders n = 1..4 up to level 10 in {:.1?}", elapsed))
}

fn criterion_5() -> Outcome {
    let t = tower("basilica.grp");
    let gamma3 = sub(&t, "gamma3");
    let gsecond = sub(&t, "Gsecond");
    let mut tally = Tally::default();
    let g2 = t.eval_subgroup(&gsecond, 6).unwrap();
    for (i, g) in g2.group.generators().iter().enumerate() {
        tally.claim(t.pullback_perm(g, &gamma3, 6).unwrap(), || format!("G'' generator {}", g2.describe(i)));
    }
    let g3 = t.eval_subgroup(&gamma3, 5).unwrap();
    for (i, u) in g3.group.generators().iter().enumerate() {
        for v in Vertex::level_vertices(2, 1) {
            tally.claim(t.embedded_member(u, &v, &gsecond, 6).unwrap(), || {
                format!("gamma3 generator {} below {v}", g3.describe(i))
            });
        }
    }
    // The same inclusion for the automaton of the normal generator of gamma3
    // and its conjugates.
    let r = t.resolved();
    for word in ["[[a, b^-1], b]", "[[a, b^-1], b]^a", "[[a, b^-1], b]^b"] {
        let u = r.eval(&el(&t, word)).unwrap();
        for v in Vertex::level_vertices(2, 1) {
            let placed = u.embed_at(&v).unwrap().truncate(6).unwrap();
            tally.claim(t.perm_member(&placed, &gsecond, 6).unwrap(), || format!("{word} below {v}"));
        }
    }
    tally.outcome(format!(
        "{} G'' generators pulled back, {} gamma3 generators embedded at level 6",
        g2.group.generators().len(),
        g3.group.generators().len()
    ))
}

fn criterion_6() -> Outcome {
    let t = tower("ggs3.grp");
    let gsecond = sub(&t, "Gsecond");
    let ksecond = sub(&t, "Ksecond");
    let gamma3k = sub(&t, "gamma3K");
    let mut tally = Tally::default();
    let g2 = t.eval_subgroup(&gsecond, 3).unwrap();
    for (i, u) in g2.group.generators().iter().enumerate() {
        for v in Vertex::level_vertices(3, 1) {
            tally.claim(t.embedded_member(u, &v, &ksecond, 4).unwrap(), || {
                format!("G'' generator {} below {v}", g2.describe(i))
            });
        }
    }
    let escape = t.first_escape(&gsecond, &gamma3k, 4).unwrap();
    tally.claim(escape.is_none(), || format!("{escape:?} outside gamma3(K)"));
    tally.outcome(format!("{} G'' generators at level 4", g2.group.generators().len()))
}

fn criterion_7() -> Outcome {
    let t = tower("basilica.grp");
    let gp = sub(&t, "Gprime");
    let gamma3 = sub(&t, "gamma3");
    let joined = sub(&t, "join(gamma3, gens([a, b^-1]))");
    let mut tally = Tally::default();
    let mut indices = Vec::new();
    for n in [2, 4, 6, 8] {
        let big_g = t.eval_subgroup(&gp, n).unwrap();
        let small = t.eval_subgroup(&gamma3, n).unwrap();
        let idx = arbor::permgroup::index(&big_g.group, &small.group).unwrap();
        tally.claim(idx.count_ones() == 1, || format!("index {idx} at {n} is not a power of 2"));
        tally.claim(t.subgroups_equal(&joined, &gp, n).unwrap(), || format!("[a,b^-1] misses G' at {n}"));
        indices.push(idx);
    }
    let increases = indices.windows(2).filter(|w| w[1] > w[0]).count();
    tally.claim(increases >= 2, || format!("only {increases} increases"));
    let shown: Vec<String> = indices.iter().map(ToString::to_string).collect();
    tally.outcome(format!("|G'_n : gamma3_n| = {} at n = 2, 4, 6, 8", shown.join(", ")))
}

/// Re-checks a scan certificate: the witness lies in `st(k)` at its level
/// and outside the target there.
fn witness_is_genuine(t: &Tower, target: &SubgroupExpr, claim: &str, level: usize, witness: &str) -> bool {
    let Some(k) = claim
        .strip_prefix("stab(")
        .and_then(|r| r.split(')').next())
        .and_then(|k| k.parse::<usize>().ok())
    else {
        return false;
    };
    let d = t.degree();
    let perm = match parse_element(witness, &t.resolved().definition) {
        Ok(e) => t.element_perm(&e, level).unwrap(),
        Err(_) => match Permutation::parse_cycles(d.pow(level as u32), witness) {
            Ok(p) => p,
            Err(_) => return false,
        },
    };
    tree::fixes_level(&perm, d, level, k) && !t.perm_member(&perm, target, level).unwrap()
}

fn criterion_8() -> Outcome {
    let mut tally = Tally::default();
    let mut found = Vec::new();
    for (file, target, depth) in [("basilica.grp", "Gprime", 8), ("ggs3.grp", "Kprime", 4), ("ggs5.grp", "Kprime", 4)] {
        let t = tower(file);
        let n = sub(&t, target);
        let report = t.congruence_scan(&n, depth).unwrap();
        tally.claim(report.verdict == Verdict::NotContainedUpTo(depth), || {
            format!("{file} {target}: {:?}", report.verdict)
        });
        tally.claim(report.certificates.len() == depth, || {
            format!("{file}: {} certificates", report.certificates.len())
        });
        for c in &report.certificates {
            let ok = !c.holds
                && c.element
                    .as_deref()
                    .is_some_and(|w| witness_is_genuine(&t, &n, &c.claim, c.level, w));
            tally.claim(ok, || format!("{file}: certificate {c}"));
        }
        // The subgroup K itself has index p and contains st(2).
        if file != "basilica.grp" {
            let k = t.congruence_scan(&sub(&t, "K"), depth).unwrap();
            found.push(format!("{file} K: {:?}", k.verdict));
        }
    }
    tally.outcome(format!(
        "Basilica G' and GGS K' escape every level stabilizer, witnesses re-checked ({})",
        found.join(", ")
    ))
}

fn bfs(gens: &[Permutation]) -> HashSet<Permutation> {
    let id = Permutation::identity(gens[0].degree());
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

/// A uniformly random automorphism of the `d`-ary tree truncated at `n`.
fn random_tree_perm(rng: &mut ChaCha8Rng, d: usize, n: usize) -> Permutation {
    let mut images: Vec<u32> = (0..d as u32).collect();
    for i in (1..d).rev() {
        images.swap(i, rng.gen_range(0..=i));
    }
    let root = Permutation::from_images(images).unwrap();
    if n == 1 {
        return root;
    }
    let sections: Vec<Permutation> = (0..d).map(|_| random_tree_perm(rng, d, n - 1)).collect();
    tree::combine(&sections, &root, d, n)
}

fn criterion_9() -> Outcome {
    let mut tally = Tally::default();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut orders = Vec::new();
    for (file, levels) in [("basilica.grp", [2usize, 3]), ("ggs3.grp", [1, 2])] {
        let t = tower(file);
        let d = t.degree();
        for n in levels {
            let gens: Vec<Permutation> = t.generator_perms(n).unwrap().iter().map(|(_, p)| p.clone()).collect();
            let elements = bfs(&gens);
            tally.claim(elements.len() <= 1_000_000, || format!("{file} level {n} exceeds the cap"));
            let q = t.level_quotient(n).unwrap();
            tally.claim(q.quotient.order() == big(elements.len() as u64), || {
                format!("{file} level {n}: BSGS {} vs BFS {}", q.quotient.order(), elements.len())
            });
            orders.push(format!("{file}@{n}={}", elements.len()));
        }
        let n = *levels.last().unwrap();
        let q = t.level_quotient(n).unwrap();
        let gens: Vec<Permutation> = t.generator_perms(n).unwrap().iter().map(|(_, p)| p.clone()).collect();
        let elements = bfs(&gens);
        let members: Vec<&Permutation> = elements.iter().collect();
        let mut disagreements = 0;
        let mut inside = 0;
        for i in 0..1000 {
            // Alternate between group elements and arbitrary tree automorphisms.
            let x = if i % 2 == 0 {
                members[rng.gen_range(0..members.len())].clone()
            } else {
                random_tree_perm(&mut rng, d, n)
            };
            let sift = q.quotient.contains(&x).unwrap();
            inside += usize::from(sift);
            if sift != elements.contains(&x) {
                disagreements += 1;
            }
        }
        tally.claim(disagreements == 0, || format!("{file}: {disagreements} sift disagreements"));
        orders.push(format!("{file}: 1000 sifts, {inside} members"));
    }
    tally.outcome(orders.join(", "))
}

/// A random machine with up to five states and one of its states.
fn random_machine(rng: &mut ChaCha8Rng, d: usize) -> (MealyMachine, u32) {
    let k = rng.gen_range(1..=5usize);
    let mut states = vec![MachineState::identity(d)];
    for _ in 1..k {
        let mut images: Vec<u32> = (0..d as u32).collect();
        for i in (1..d).rev() {
            images.swap(i, rng.gen_range(0..=i));
        }
        let transitions = (0..d).map(|_| rng.gen_range(0..k as u32)).collect();
        states.push(MachineState {
            perm: Permutation::from_images(images).unwrap(),
            transitions,
        });
    }
    (MealyMachine::new(d, states).unwrap(), rng.gen_range(0..k as u32))
}

fn random_element(rng: &mut ChaCha8Rng, d: usize) -> Element {
    let (m, s) = random_machine(rng, d);
    Element::new(&m, s)
}

/// The image of a vertex under a state, read off the machine directly.
fn raw_act(m: &MealyMachine, mut s: u32, v: &Vertex) -> Vertex {
    let mut out = Vec::new();
    for &x in v.path() {
        let st = m.state(s);
        out.push(st.perm.image(x - 1) + 1);
        s = st.transitions[x - 1];
    }
    Vertex::new(out)
}

fn random_vertex(rng: &mut ChaCha8Rng, d: usize) -> Vertex {
    let len = rng.gen_range(0..=3);
    Vertex::new((0..len).map(|_| rng.gen_range(1..=d)).collect())
}

const PROPERTY_CASES: usize = 2000;

fn criterion_10() -> Outcome {
    let mut tally = Tally::default();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut cases = 0;
    for i in 0..PROPERTY_CASES {
        let d = 2 + i % 2;
        let (g, h, k) = (random_element(&mut rng, d), random_element(&mut rng, d), random_element(&mut rng, d));
        let n = rng.gen_range(0..=4);
        let gh = g.compose(&h).unwrap();
        let (tg, th) = (g.truncate(n).unwrap(), h.truncate(n).unwrap());
        tally.claim(gh.truncate(n).unwrap() == tg.then(&th), || format!("homomorphism case {i}"));
        let v = random_vertex(&mut rng, d);
        let coherent = g.section(&v).unwrap().compose(&h.section(&g.act(&v).unwrap()).unwrap()).unwrap();
        tally.claim(gh.section(&v).unwrap() == coherent, || format!("section coherence case {i}"));
        let left = gh.compose(&k).unwrap();
        let right = g.compose(&h.compose(&k).unwrap()).unwrap();
        tally.claim(left.equal(&right).unwrap(), || format!("associativity case {i}"));
        let inv = g.inverse();
        tally.claim(inv.inverse() == g && g.compose(&inv).unwrap().is_identity(), || {
            format!("inverse case {i}")
        });
        let (raw, s) = random_machine(&mut rng, d);
        let (m, root) = raw.minimize_from(s);
        let (m2, root2) = m.minimize_from(root);
        let same_action = Vertex::level_vertices(d, 4).all(|v| raw_act(&raw, s, &v) == raw_act(&m, root, &v));
        tally.claim(same_action && m.state_count() <= raw.state_count(), || format!("minimization case {i}"));
        tally.claim(m2.to_text(root2) == m.to_text(root), || format!("minimization idempotence case {i}"));
        cases += 5;
    }

    let mut fuzz = 0;
    let tokens = ["tree", "degree", "gen", "sub", "ncl", "gamma", "a", "b", "(", ")", "[", "]", ",", "*", "^", "-", "@", "=", "#", "\n", " ", "2", "17"];
    for i in 0..PROPERTY_CASES {
        let text: String = if i % 2 == 0 {
            let bytes: Vec<u8> = (0..rng.gen_range(0..60)).map(|_| rng.gen()).collect();
            String::from_utf8_lossy(&bytes).into_owned()
        } else {
            (0..rng.gen_range(0..40)).map(|_| tokens[rng.gen_range(0..tokens.len())]).collect()
        };
        let survived = catch_unwind(AssertUnwindSafe(|| {
            let _ = parse(&text);
            let _ = parse(&format!("tree degree 2\n{text}"));
        }))
        .is_ok();
        tally.claim(survived, || format!("parser panicked on {text:?}"));
        fuzz += 1;
    }

    let start = Instant::now();
    let suites: Vec<Suite> = ["basilica.yaml", "ggs3.yaml", "ggs5.yaml", "core-properties.yaml"]
        .iter()
        .map(|s| Suite::load(&root().join("suites").join(s)).unwrap())
        .collect();
    let report = Runner::new(Caps::default()).run(&suites).unwrap();
    let elapsed = start.elapsed();
    tally.claim(report.exit_code() == 0, || format!("suites: {:?}", report.summary));
    tally.claim(within(elapsed, 300), || format!("verify took {elapsed:?}"));
    tally.outcome(format!(
        "{cases} randomized property cases, {fuzz} fuzzed inputs, {} suite checks verified in {:.1?}",
        report.summary.checks, elapsed
    ))
}

type Criterion = (usize, &'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "GGS maximal-class orders", criterion_1),
        (2, "GGS filtration identity", criterion_2),
        (3, "Basilica exact identities", criterion_3),
        (4, "Basilica membership ladders", criterion_4),
        (5, "psi(G'') = gamma3 x gamma3 evidence", criterion_5),
        (6, "GGS K'' and gamma3(K)", criterion_6),
        (7, "cyclic growth of G'/gamma3", criterion_7),
        (8, "negative congruence witnesses", criterion_8),
        (9, "oracle equivalence", criterion_9),
        (10, "property suites and full verify", criterion_10),
    ];
    let mut unexpected = Vec::new();
    for (n, name, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let known = KNOWN_UNATTAINABLE.iter().find(|(k, _)| *k == n);
        let verdict = if outcome.pass { "PASS" } else { "FAIL" };
        println!("criterion {n}: {verdict} {name} ({elapsed:.1?}): {}", outcome.detail);
        match (outcome.pass, known) {
            (false, Some((_, why))) => println!("    known unattainable: {why}"),
            (false, None) => unexpected.push(format!("criterion {n} failed")),
            (true, Some(_)) => unexpected.push(format!("criterion {n} passed but is listed as unattainable")),
            (true, None) => {}
        }
    }
    if !unexpected.is_empty() {
        eprintln!("acceptance gate failed: {}", unexpected.join(", "));
        std::process::exit(1);
    }
    println!("acceptance gate: all attainable criteria pass");
}
