use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;

use diophant_core::cfrac::{
    best_approx_reduce, convergent_error_bracket, convergents, denominators_to_cf, determinant_identity_holds,
    expand_rational, expand_real,
};
use diophant_core::dataprog::{
    all_states, cost, periodic_geometric, point_from_progression, progression_from_point, XiKind,
};
use diophant_core::dirichlet::estimate_c;
use diophant_core::funexpr::{derive_forms, f_nc, psi_nc};
use diophant_core::heights::{alpha_d, check_height_chain, gamma_d, omega_exponent};
use diophant_core::recint::{backward_sequence, ode_witness};
use diophant_core::{FuncExpr, HeightKind, PsiSpec, Rational, RationalPoint, Real};

fn rational() -> impl Strategy<Value = Rational> {
    (-1_000_000_000_000i64..1_000_000_000_000, 1i64..=1_000_000_000)
        .prop_map(|(p, q)| Rational::new(BigInt::from(p), BigInt::from(q)))
}

fn doubling_targets() -> impl Strategy<Value = Vec<BigInt>> {
    prop::collection::vec(0u32..40, 1..30).prop_map(|steps| {
        let mut t = vec![BigInt::one()];
        for s in steps {
            // next = 2 * last + s * last / 8
            let last = t.last().unwrap().clone();
            t.push(&last * 2 + &last * s / 8u32 + s);
        }
        t
    })
}

fn surd() -> impl Strategy<Value = Real> {
    (2u64..200, -20i64..20)
        .prop_filter("non-square", |(n, _)| ((*n as f64).sqrt() as u64).pow(2) != *n)
        .prop_map(|(n, c)| Real::sqrt_offset(n, c))
}

fn fibonacci(n: usize) -> BigInt {
    let (mut a, mut b) = (BigInt::zero(), BigInt::one());
    for _ in 0..n {
        let c = &a + &b;
        a = std::mem::replace(&mut b, c);
    }
    a
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn rational_expansion_round_trips(r in rational()) {
        let cf = expand_rational(&r);
        prop_assert!(cf.is_canonical());
        let convs = convergents(&cf, cf.last_index());
        prop_assert_eq!(convs.last().unwrap().value(), r);
        prop_assert!(determinant_identity_holds(&convs));
        for (n, c) in convs.iter().enumerate() {
            prop_assert!(c.q >= fibonacci(n));
            if n >= 1 && n + 1 < convs.len() {
                prop_assert!(convs[n + 1].q > c.q);
            }
        }
    }

    #[test]
    fn greedy_denominators_are_sandwiched(t in doubling_targets()) {
        let cf = denominators_to_cf(&t).unwrap();
        let convs = convergents(&cf, cf.last_index());
        prop_assert_eq!(convs.len(), t.len());
        for (c, target) in convs.iter().zip(&t) {
            prop_assert!(&c.q <= target && &(&c.q * 2) >= target);
        }
        prop_assert!(determinant_identity_holds(&convs));
    }

    #[test]
    fn convergent_error_lies_in_bracket(x in surd(), n in 0usize..12) {
        let cf = expand_real(&x, 16, 512).unwrap();
        let b = convergent_error_bracket(Some(&x), &cf, n, 512).unwrap();
        prop_assert_eq!(b.verified, Some(true));
    }

    #[test]
    fn any_approximation_reduces_to_a_convergent(x in surd(), q in 1i64..1_000_000, shift in -2i64..3) {
        let cf = expand_real(&x, 40, 1024).unwrap();
        let p = (x.to_f64() * q as f64).floor() as i64 + shift;
        let r = Rational::new(p.into(), q.into());
        let half = Rational::new(1.into(), 2.into());
        let eighth = Rational::new(1.into(), 8.into());
        let red = best_approx_reduce(&x, &cf, &r, &half, &eighth).unwrap();
        prop_assert!(red.q_ratio >= 0.5 && red.error_ratio >= 0.125);
    }

    #[test]
    fn height_chain_holds(pairs in prop::collection::vec((-1000i64..1000, 1i64..5000), 1..6)) {
        let r = RationalPoint::from_pairs(&pairs).unwrap();
        prop_assert!(check_height_chain(&r).holds);
    }

    #[test]
    fn nc_nesting_matches_log_transform(n in 0i32..3, c in 0.0f64..2.0, u in 0.0f64..1.0) {
        let f = f_nc(n, c);
        let g = f_nc(n - 1, c);
        let x = (f.t_domain().max(1.0) + 1.0) * (1.0 + 1e3 * u);
        let want = (0.25 + g.eval(x.ln()).unwrap()) / (x * x);
        let got = f.eval(x).unwrap();
        prop_assert!((got - want).abs() <= 1e-12 * want.abs().max(1e-300));
    }

    #[test]
    fn family_reduction_identity(d in 3usize..6, n in 1u32..4, ci in 0usize..4, u in 0.0f64..1.0) {
        let c = [0.0, 0.5, 1.0, 2.0][ci];
        let forms = derive_forms(&psi_nc(d, n, c).unwrap(), d).unwrap();
        let g = gamma_d(d).ln();
        let reduced = f_nc(n as i32 - 2, c / 4.0);
        let y = reduced.t_domain().max(1.0) + 1.0 + 30.0 * u;
        let x = y / g;
        let want = g * g * reduced.eval(y).unwrap();
        let got = forms.f_psi.eval(x).unwrap();
        prop_assert!((got - want).abs() <= 1e-10 * want.abs().max(1e-12), "{} vs {}", got, want);
    }

    #[test]
    fn f_psi_matches_phi(a in 1.0f64..3.0, d in 3usize..7, x in 1.0f64..40.0) {
        let forms = derive_forms(&PsiSpec::PowerLaw(a), d).unwrap();
        let g = gamma_d(d);
        let want = 2.0 / (d as f64 * g) * forms.phi.eval(g.powf(x)).unwrap();
        let got = forms.f_psi.eval(x).unwrap();
        prop_assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0));
    }

    #[test]
    fn periodic_geometric_cost_closed_form(d in 2usize..6, g in 1.05f64..2.5, a in 0.5f64..4.0) {
        let p = periodic_geometric(d, g, 40).unwrap();
        let r = cost(&p, XiKind::Max, |b| Ok(a * b), usize::MAX).unwrap();
        let states = all_states(&p).unwrap();
        for w in states.windows(2) {
            let changed = w[0].b.iter().zip(&w[1].b).filter(|(x, y)| x != y).count();
            prop_assert_eq!(changed, 1);
        }
        for t in &r.terms {
            let want = (a - g.powi(1 - d as i32) - g) * g.powi(t.k as i32);
            prop_assert!((t.value - want).abs() <= 1e-10 * t.scale.max(1.0), "k={} {} vs {}", t.k, t.value, want);
        }
    }

    #[test]
    fn point_and_progression_round_trip(d in 2usize..4, g in 1.3f64..2.5) {
        // keep A_k below ~5000 so the denominators stay a few thousand digits long
        let len = (5000f64.ln() / g.ln()) as usize;
        let p = periodic_geometric(d, g, len.max(2 * d + 2)).unwrap();
        let x = point_from_progression(&p, usize::MAX).unwrap();
        let back = progression_from_point(&x.coords, 64).unwrap();
        let states = all_states(&back).unwrap();
        // every milestone of the source shows up in the rebuilt states within log 2
        for (i, ms) in x.milestones.iter().enumerate() {
            for &m in ms.iter().take(ms.len().saturating_sub(1)) {
                let hit = states.iter().any(|s| (s.b[i] - m).abs() <= 2f64.ln() + 0.01);
                prop_assert!(hit, "coordinate {} milestone {}", i + 1, m);
            }
        }
    }

    #[test]
    fn recurrence_is_monotone_in_n(c in 0.0f64..0.4, k0 in 2u64..20, n in 30u64..400, extra in 1u64..400) {
        let f = FuncExpr::var().powf(-2.0).scale(c);
        let short = backward_sequence(&f, k0, n).unwrap();
        let long = backward_sequence(&f, k0, n + extra).unwrap();
        for (s, l) in short.iter().zip(&long) {
            prop_assert!(s <= l);
        }
    }

    #[test]
    fn smaller_f_gives_larger_trace(c1 in 0.0f64..0.2, dc in 0.0f64..0.05) {
        let f1 = FuncExpr::var().powf(-2.0).scale(c1);
        let f2 = FuncExpr::var().powf(-2.0).scale(c1 + dc);
        let (t1, g0) = (10.0, 0.1);
        let a = ode_witness(&f1, t1, g0, 1e3, 1e-10).unwrap();
        let b = ode_witness(&f2, t1, g0, 1e3, 1e-10).unwrap();
        let eval = |pts: &[(f64, f64)], x: f64| {
            let j = pts.partition_point(|p| p.0 < x).clamp(1, pts.len() - 1);
            let (x0, y0) = pts[j - 1];
            let (x1, y1) = pts[j];
            y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        };
        let end = a.points.last().unwrap().0.min(b.points.last().unwrap().0);
        for &(x, gb) in b.points.iter().filter(|p| p.0 <= end) {
            prop_assert!(eval(&a.points, x) >= gb - 1e-7 * gb.abs().max(1e-3));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn larger_psi_gives_smaller_constant(a in 1.2f64..2.2, da in 0.0f64..0.3, kind in 0usize..3) {
        let kind = [HeightKind::Max, HeightKind::Min, HeightKind::Prod][kind];
        let x = vec![Real::sqrt_offset(2, -1), Real::sqrt_offset(3, -1)];
        // q^-(a+da) <= q^-a, so the larger function sees the smaller ratio
        let small = estimate_c(&x, kind, &PsiSpec::PowerLaw(a + da), 1e5, Some(10.0)).unwrap();
        let large = estimate_c(&x, kind, &PsiSpec::PowerLaw(a), 1e5, Some(10.0)).unwrap();
        prop_assert!(small.min_ratio >= large.min_ratio);
    }

    #[test]
    fn constant_estimate_nonincreasing_in_qmax(e1 in 3.0f64..5.0, de in 0.0f64..1.5, a in 1.5f64..2.5) {
        let x = vec![Real::sqrt_offset(2, -1), Real::sqrt_offset(5, -2)];
        let psi = PsiSpec::PowerLaw(a);
        let lo = estimate_c(&x, HeightKind::Max, &psi, 10f64.powf(e1), Some(100.0)).unwrap();
        let hi = estimate_c(&x, HeightKind::Max, &psi, 10f64.powf(e1 + de), Some(100.0)).unwrap();
        prop_assert!(hi.min_ratio <= lo.min_ratio);
    }
}

#[test]
fn exponent_chain_and_constants() {
    for d in 2..=12 {
        let w = |k| omega_exponent(k, d).unwrap();
        let (prod, lcm, max, min) = (w(HeightKind::Prod), w(HeightKind::Lcm), w(HeightKind::Max), w(HeightKind::Min));
        let df = d as f64;
        assert!(prod <= lcm && lcm <= max && max <= df * prod + 1e-12 && df * prod <= min + 1e-12, "d = {d}");
        if d >= 3 {
            let g = gamma_d(d);
            assert!((alpha_d(d) - (g + g.powi(1 - d as i32))).abs() < 1e-12);
        }
    }
}
