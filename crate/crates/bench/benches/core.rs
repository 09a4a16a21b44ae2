use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use diophant_bench::{recint_inputs, surd_pair};
use diophant_core::cfrac::expand_real;
use diophant_core::dataprog::{cost, periodic_geometric, XiKind};
use diophant_core::dirichlet::{build_bad_point_for_max, dirichlet_decide, estimate_omega};
use diophant_core::heights::{alpha_d, gamma_d};
use diophant_core::recint::{decide_rr, Method, RrConfig};
use diophant_core::{HeightKind, PsiSpec, Real};

fn cfrac(c: &mut Criterion) {
    let mut g = c.benchmark_group("cfrac");
    for x in ["pi", "sqrt2-1", "(1+sqrt5)/2"] {
        let r = Real::parse(x).unwrap();
        g.bench_with_input(BenchmarkId::new("expand_200", x), &r, |b, r| b.iter(|| expand_real(r, 200, 1024).unwrap()));
    }
    g.finish();
}

fn recint(c: &mut Criterion) {
    let cfg = RrConfig::default();
    let mut g = c.benchmark_group("decide_rr");
    g.sample_size(10);
    for (name, f) in recint_inputs() {
        for method in [Method::Ode, Method::Recurrence] {
            let id = BenchmarkId::new(format!("{method:?}"), name);
            g.bench_with_input(id, &f, |b, f| b.iter(|| decide_rr(f, method, &cfg).unwrap()));
        }
    }
    g.finish();
}

fn heights(c: &mut Criterion) {
    let x = surd_pair();
    let mut g = c.benchmark_group("estimate_omega");
    g.sample_size(10);
    for kind in [HeightKind::Max, HeightKind::Min, HeightKind::Prod, HeightKind::Lcm] {
        g.bench_function(format!("{kind:?}_1e6"), |b| b.iter(|| estimate_omega(&x, kind, 1e6).unwrap()));
    }
    g.finish();
}

fn dataprog(c: &mut Criterion) {
    let p = periodic_geometric(3, gamma_d(3), 1000).unwrap();
    let a = alpha_d(3);
    c.bench_function("cost_periodic_geometric_1000", |b| {
        b.iter(|| cost(&p, XiKind::Max, |v| Ok(a * v), usize::MAX).unwrap())
    });
}

fn dirichlet(c: &mut Criterion) {
    let cfg = RrConfig::default();
    let mut g = c.benchmark_group("dirichlet");
    g.sample_size(10);
    g.bench_function("decide_power_1.8", |b| b.iter(|| dirichlet_decide(&PsiSpec::PowerLaw(1.8), 3, &cfg).unwrap()));
    g.bench_function("bad_point_d3_25_terms", |b| {
        b.iter(|| build_bad_point_for_max(3, &PsiSpec::PowerLaw(alpha_d(3)), 25, &cfg).unwrap())
    });
    g.finish();
}

criterion_group!(benches, cfrac, recint, heights, dataprog, dirichlet);
criterion_main!(benches);
