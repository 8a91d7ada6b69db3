use arbor::dsl::parse_element;
use arbor::{Layout, PermGroup};
use arbor_bench::{subgroup, tower};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn level_quotients(c: &mut Criterion) {
    let mut g = c.benchmark_group("level_quotient");
    g.sample_size(10);
    for (file, n) in [("basilica.grp", 6), ("basilica.grp", 8), ("ggs3.grp", 4), ("ggs5.grp", 3)] {
        g.bench_with_input(BenchmarkId::new(file, n), &n, |b, &n| {
            b.iter(|| tower(file).level_quotient(n).unwrap())
        });
    }
    g.finish();
}

fn schreier_sims(c: &mut Criterion) {
    let t = tower("basilica.grp");
    let mut g = c.benchmark_group("schreier_sims");
    g.sample_size(10);
    for n in [6, 8, 10] {
        let gens: Vec<_> = t.generator_perms(n).unwrap().iter().map(|(_, p)| p.clone()).collect();
        g.bench_with_input(BenchmarkId::new("basilica tree base", n), &gens, |b, gens| {
            b.iter(|| PermGroup::build_on(Layout::tree(2, n), gens).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("basilica flat base", n), &gens, |b, gens| {
            b.iter(|| PermGroup::build(gens, 1 << n).unwrap())
        });
    }
    g.finish();
}

fn membership(c: &mut Criterion) {
    let t = tower("basilica.grp");
    let gp = subgroup(&t, "Gprime");
    let b16 = parse_element("b^16", &t.resolved().definition).unwrap();
    t.coset_member(&b16, &gp, 9).unwrap();
    c.bench_function("coset_member b^16 in G' at level 9 (warm)", |b| {
        b.iter(|| t.coset_member(&b16, &gp, 9).unwrap())
    });
    let perm = t.element_perm(&b16, 9).unwrap();
    let image = t.eval_subgroup(&gp, 9).unwrap();
    c.bench_function("sift at level 9", |b| b.iter(|| image.group.contains(&perm).unwrap()));
}

fn scans(c: &mut Criterion) {
    let mut g = c.benchmark_group("congruence_scan");
    g.sample_size(10);
    g.bench_function("basilica G' depth 6", |b| {
        b.iter(|| {
            let t = tower("basilica.grp");
            t.congruence_scan(&subgroup(&t, "Gprime"), 6).unwrap()
        })
    });
    g.bench_function("ggs3 K' depth 4", |b| {
        b.iter(|| {
            let t = tower("ggs3.grp");
            t.congruence_scan(&subgroup(&t, "Kprime"), 4).unwrap()
        })
    });
    g.finish();
}

criterion_group!(benches, level_quotients, schreier_sims, membership, scans);
criterion_main!(benches);
