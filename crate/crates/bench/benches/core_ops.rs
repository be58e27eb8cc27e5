use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use treelike::{
    build_ball, c_p, d_from_c, d_from_tree, jordan_witness, orbit_classification, shape,
    three_transitivity_witness, AtomTable, Prime,
};
use treelike_bench::{cone_pair, quads, rationals, tuple};

fn relations(c: &mut Criterion) {
    let qs = quads(1024, 12, 1);
    c.bench_function("d_from_c x1024", |b| {
        b.iter(|| qs.iter().filter(|[x, y, z, w]| d_from_c(x, y, z, w)).count())
    });
    c.bench_function("d_from_tree x1024", |b| {
        b.iter(|| qs.iter().filter(|[x, y, z, w]| d_from_tree(x, y, z, w)).count())
    });
    let p = Prime::new(3).unwrap();
    let rs = rationals(300, 3, 2);
    c.bench_function("c_p x100", |b| {
        b.iter(|| rs.chunks(3).filter(|t| c_p(p, &t[0], &t[1], &t[2])).count())
    });
}

fn tuples(c: &mut Criterion) {
    let t = tuple(5, 12, 3);
    c.bench_function("shape of 5 ends", |b| b.iter(|| shape(black_box(&t)).unwrap()));
    c.bench_function("atom table of 5 ends", |b| b.iter(|| AtomTable::of(black_box(&t))));
    c.bench_function("orbit classification of 5 ends", |b| {
        b.iter(|| orbit_classification(black_box(&t)).unwrap())
    });
}

fn witnesses(c: &mut Criterion) {
    let (cone, x, y) = cone_pair(4);
    c.bench_function("jordan witness", |b| b.iter(|| jordan_witness(&cone, &x, &y).unwrap()));
    let src = tuple(3, 12, 5);
    let tgt = tuple(3, 12, 6);
    c.bench_function("3-transitivity witness", |b| {
        b.iter(|| three_transitivity_witness([&src[0], &src[1], &src[2]], [&tgt[0], &tgt[1], &tgt[2]]).unwrap())
    });
}

fn graphs(c: &mut Criterion) {
    c.bench_function("build Γ(2,3) ball radius 6", |b| b.iter(|| build_ball(2, 3, black_box(6)).unwrap()));
}

criterion_group!(benches, relations, tuples, witnesses, graphs);
criterion_main!(benches);
