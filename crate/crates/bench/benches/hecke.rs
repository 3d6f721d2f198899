use std::hint::black_box;
use std::sync::Arc;

use affhecke::{
    aw_adm, c_kottwitz, c_theta, m_compute, wk_function, AffineWeylElement, Coweight, Family,
    HeckeElement, KlStore, RootDatum,
};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn datum(f: Family, r: usize) -> Arc<RootDatum> {
    Arc::new(RootDatum::new(f, r).unwrap())
}

fn hecke_products(c: &mut Criterion) {
    let d = datum(Family::GL, 4);
    let t = AffineWeylElement::translation(&d, &Coweight(vec![2, 1, 0, 0])).unwrap();
    let lam = Coweight(vec![0, 1, -1, 1]);
    c.bench_function("T_t * T_t^-1 GL4 (2,1,0,0)", |b| {
        b.iter(|| HeckeElement::t(black_box(&t)).mul_t_inv(&t))
    });
    c.bench_function("bar T_t GL4 (2,1,0,0)", |b| {
        b.iter(|| HeckeElement::t(black_box(&t)).bar())
    });
    c.bench_function("theta GL4 (0,1,-1,1)", |b| {
        b.iter(|| c_theta(&d, black_box(&lam)).unwrap())
    });
    let v = AffineWeylElement::from_word(&AffineWeylElement::identity(&d), &[0, 1, 2, 3]);
    let w = AffineWeylElement::from_word(&AffineWeylElement::identity(&d), &[3, 2, 1, 0, 1]);
    c.bench_function("wakimoto GL4 l=4+5", |b| {
        b.iter(|| wk_function(black_box(&v), &w).unwrap())
    });
}

fn kl_polynomials(c: &mut Criterion) {
    let mut group = c.benchmark_group("KL columns over Adm");
    group.sample_size(10);
    for (f, r, mu) in [
        (Family::GL, 4, vec![1, 1, 0, 0]),
        (Family::GL, 4, vec![2, 1, 0, 0]),
        (Family::GSp, 3, vec![1, 1, 1, 1]),
    ] {
        let d = datum(f, r);
        let adm = aw_adm(&d, &Coweight(mu.clone())).unwrap();
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{} {mu:?}", d.id())),
            &adm,
            |b, adm| {
                b.iter(|| {
                    let store = KlStore::new(&d);
                    for x in adm {
                        black_box(store.kl_column(x));
                    }
                })
            },
        );
    }
    group.finish();
}

fn tables(c: &mut Criterion) {
    let mut group = c.benchmark_group("multiplicity table");
    group.sample_size(10);
    for (f, r, mu) in [
        (Family::GL, 4, vec![1, 1, 0, 0]),
        (Family::GL, 5, vec![1, 1, 0, 0, 0]),
        (Family::GL, 3, vec![3, 1, 0]),
        (Family::G2, 2, vec![0, 1]),
    ] {
        let d = datum(f, r);
        let mu = Coweight(mu);
        group.bench_with_input(
            BenchmarkId::new("kottwitz", d.id().to_string()),
            &mu,
            |b, mu| b.iter(|| c_kottwitz(&d, mu).unwrap()),
        );
        group.bench_with_input(
            BenchmarkId::new("cold", d.id().to_string()),
            &mu,
            |b, mu| b.iter(|| m_compute(&KlStore::new(&d), mu).unwrap()),
        );
    }
    group.finish();
}

criterion_group!(benches, hecke_products, kl_polynomials, tables);
criterion_main!(benches);
