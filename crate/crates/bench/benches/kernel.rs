use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use restrict_lr_core::brauer::{crossed_product, search_split_witness};
use restrict_lr_core::ext::classify_ext;
use restrict_lr_core::linalg::Matrix;
use restrict_lr_core::uenv::{pbw_rank_check, standard_strategies};
use restrict_lr_core::{check_lrr_axioms, der_algebra, BaseField, BeckModule, CheckConfig, CommAlgebra, Enveloping, InsepExtension, Vector};

fn witt(p: u32) -> restrict_lr_core::RestrictedLieRinehart {
    der_algebra(&CommAlgebra::truncated_polynomial(BaseField::prime(p).unwrap(), "x", p)).unwrap()
}

fn field(c: &mut Criterion) {
    let k = BaseField::rational(3).unwrap();
    let mut rng = CheckConfig::new(1, 1).rng("bench");
    let xs: Vec<_> = (0..64).map(|_| k.random(&mut rng)).collect();
    c.bench_function("ratfunc product chain", |b| {
        b.iter(|| xs.iter().fold(k.one(), |acc, x| &acc * x))
    });
    let mut group = c.benchmark_group("rank over F_3(t)");
    for n in [4usize, 8, 12] {
        let rows: Vec<Vector> = (0..n).map(|_| k.random_vector(n, &mut rng)).collect();
        let m = Matrix::from_rows(3, n, &rows).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| b.iter(|| m.rank()));
    }
    group.finish();
}

fn axioms(c: &mut Criterion) {
    let config = CheckConfig::new(20, 0);
    let mut group = c.benchmark_group("axiom checker");
    for p in [2, 3] {
        let l = witt(p);
        group.bench_with_input(BenchmarkId::new("Der(F_p[x]/x^p)", p), &l, |b, l| b.iter(|| check_lrr_axioms(l, &config)));
    }
    group.finish();
}

fn normal_forms(c: &mut Criterion) {
    let l = witt(3);
    let u = Enveloping::restricted(&l);
    let mut rng = CheckConfig::new(1, 2).rng("words");
    let words: Vec<_> = (0..20).map(|_| u.random_word(6, &mut rng)).collect();
    let mut group = c.benchmark_group("normal form, p = 3");
    for (i, s) in standard_strategies().into_iter().enumerate() {
        group.bench_with_input(BenchmarkId::from_parameter(i), &s, |b, &s| {
            b.iter(|| {
                for w in &words {
                    black_box(u.normal_form(w, s).unwrap());
                }
            })
        });
    }
    group.finish();
    let config = CheckConfig::new(5, 0);
    c.bench_function("pbw rank check, p = 3", |b| b.iter(|| pbw_rank_check(&l, &config)));
}

fn extensions(c: &mut Criterion) {
    let l = witt(2);
    let m = BeckModule::regular(&l);
    let config = CheckConfig::new(5, 0);
    c.bench_function("classify Der(F_2[x]/x^2) by A", |b| b.iter(|| classify_ext(&l, &m, &config).unwrap()));
}

fn brauer(c: &mut Criterion) {
    let mut group = c.benchmark_group("crossed product");
    for p in [2, 3] {
        let e = InsepExtension::new(p).unwrap();
        let t = e.base().t();
        group.bench_with_input(BenchmarkId::from_parameter(p), &t, |b, t| b.iter(|| crossed_product(&e, t).unwrap()));
    }
    group.finish();
    let e = InsepExtension::new(2).unwrap();
    let t = e.base().t();
    c.bench_function("split witness search, p = 2", |b| b.iter(|| search_split_witness(&e, &t, 1)));
}

criterion_group!(benches, field, axioms, normal_forms, extensions, brauer);
criterion_main!(benches);
