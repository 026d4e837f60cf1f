use criterion::Criterion;
use kleinzeta_core::gdcohom::{alpha_pullback, h3_basis, monomials_of_degree, CycPoly, CONDUCTOR};
use kleinzeta_core::hecke::{h3_local_factor_product, hecke_table};
use kleinzeta_core::thetasupp::{scan_type, CosetType, ScanBox};
use kleinzeta_core::{CyclotomicNumber, RationalDifferential};

pub fn bench(c: &mut Criterion) {
    c.bench_function("hecke_table 1000", |b| b.iter(|| hecke_table(1000)));
    c.bench_function("product factor p=3", |b| b.iter(|| h3_local_factor_product(3).unwrap()));

    let basis = h3_basis().unwrap();
    let mut a = CycPoly::zero(7);
    for (i, e) in monomials_of_degree(7).into_iter().step_by(29).enumerate() {
        a.add_term(e, CyclotomicNumber::zeta_pow(CONDUCTOR, i as i64));
    }
    let w = RationalDifferential::new(a, 4).unwrap();
    c.bench_function("reduce pole 4", |b| b.iter(|| basis.coordinates(&w)));
    c.bench_function("alpha matrix", |b| b.iter(|| alpha_pullback(&basis)));

    let mut group = c.benchmark_group("theta");
    group.sample_size(10);
    let small = ScanBox {
        radius: 2,
        v_min: -2,
        v_max: 2,
        unit_depth: 2,
    };
    group.bench_function("scan IV p=11 radius 2", |b| b.iter(|| scan_type(11, CosetType::IV, &small).unwrap()));
    group.finish();
}
