use proptest::prelude::*;
use pushwass::bounds::{bound_report, interpolated_bound, interpolation_constant, rearrange_decreasing};
use pushwass::pushforward::lq_error;
use pushwass::{build_quadrature, pushforward, wasserstein_p, DensityWeight, ParameterBox, QuadratureScheme};

fn poly(c: &[f64]) -> impl Fn(&[f64]) -> f64 + Sync + '_ {
    move |x: &[f64]| c.iter().rev().fold(0.0, |acc, &a| acc * x[0] + a)
}

fn coeffs() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0f64..3.0, 1..6)
}

fn unit_quad(m: usize) -> (pushwass::ParameterQuadrature, DensityWeight) {
    let bbox = ParameterBox::unit(1).unwrap();
    let w = DensityWeight::uniform(&bbox);
    (build_quadrature(&bbox, &w, m, QuadratureScheme::MidpointGrid).unwrap(), w)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wasserstein_below_lp_and_sup(a in coeffs(), b in coeffs(), p in 1.0f64..4.0) {
        let (quad, _) = unit_quad(400);
        let (f, g) = (poly(&a), poly(&b));
        let w = wasserstein_p(&pushforward(&f, &quad).unwrap(), &pushforward(&g, &quad).unwrap(), p).unwrap();
        let lp = lq_error(&f, &g, &quad, p).unwrap();
        let sup = lq_error(&f, &g, &quad, f64::INFINITY).unwrap();
        prop_assert!(w <= lp * (1.0 + 1e-12) + 1e-12);
        prop_assert!(lp <= sup * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn interpolated_bounds_dominate(a in coeffs(), b in coeffs(), p in 1.0f64..3.0, q in 1.0f64..5.0) {
        let (quad, w) = unit_quad(400);
        let (f, g) = (poly(&a), poly(&b));
        let r = bound_report(&f, &g, &quad, &w, p, &[q], 0).unwrap();
        prop_assert!(r.upper_interp[0].value + 1e-12 >= r.w_p);
        prop_assert!(r.all_hold());
    }

    #[test]
    fn constant_is_minimal_splitting(p in 1.0f64..5.0, q in 0.5f64..6.0) {
        let c = interpolation_constant(p, q);
        // C(p, q) = min over r > 0 of (r^q + r^{-p})^{1/p}, attained at r^{p+q} = p/q.
        let objective = |r: f64| (r.powf(q) + r.powf(-p)).powf(1.0 / p);
        let best = (1..4000).map(|i| objective(0.01 * i as f64 / 4.0 + 0.001)).fold(f64::INFINITY, f64::min);
        let at_opt = objective((p / q).powf(1.0 / (p + q)));
        prop_assert!((at_opt - c).abs() <= 1e-12 * c);
        prop_assert!(c <= best + 1e-12);
    }

    #[test]
    fn interpolated_bound_is_homogeneous(p in 1.0f64..4.0, q in 1.0f64..4.0, s in 0.0f64..2.0, l in 0.0f64..2.0, t in 0.1f64..10.0) {
        let base = interpolated_bound(p, q, s, l);
        prop_assert!((interpolated_bound(p, q, t * s, t * l) - t * base).abs() <= 1e-10 * (1.0 + t * base));
    }

    #[test]
    fn ordered_pairs_attain_equality(a in coeffs(), gap in prop::collection::vec(0.0f64..1.0, 1..4)) {
        let (quad, w) = unit_quad(400);
        let f = poly(&a);
        let g = |x: &[f64]| f(x) - gap.iter().enumerate().map(|(k, c)| c * x[0].powi(2 * k as i32)).sum::<f64>();
        let r = bound_report(&f, &g, &quad, &w, 1.0, &[], 0).unwrap();
        prop_assert!((r.w_p - r.upper_lp).abs() <= 1e-10 * (1.0 + r.upper_lp));
        prop_assert!((r.lower_mean.unwrap() - r.w_p).abs() <= 1e-10 * (1.0 + r.w_p));
    }

    #[test]
    fn rearrangement_preserves_norms(a in coeffs(), p in 1.0f64..5.0) {
        let (quad, _) = unit_quad(500);
        let f = poly(&a);
        let rf = rearrange_decreasing(&f, &quad).unwrap();
        prop_assert!(rf.values().windows(2).all(|w| w[0] > w[1]));
        let direct = quad.integrate(&|x: &[f64]| f(x).abs().powf(p)).powf(1.0 / p);
        prop_assert!((rf.norm(p) - direct).abs() <= 1e-10 * (1.0 + direct));
    }

    #[test]
    fn lq_is_nondecreasing_in_q(a in coeffs(), b in coeffs(), q in 1.0f64..5.0, dq in 0.0f64..3.0) {
        let (quad, _) = unit_quad(300);
        let (f, g) = (poly(&a), poly(&b));
        let lo = lq_error(&f, &g, &quad, q).unwrap();
        let hi = lq_error(&f, &g, &quad, q + dq).unwrap();
        prop_assert!(lo <= hi * (1.0 + 1e-12) + 1e-14);
    }
}

#[test]
fn linear_pair_first_coefficient() {
    let (quad, w) = unit_quad(4000);
    let r = bound_report(&|x: &[f64]| 3.0 * x[0] - 3.0, &|x: &[f64]| 2.0 * x[0] - 2.0, &quad, &w, 2.0, &[2.0], 5).unwrap();
    assert!((r.lower_moments[0].a_k - (2.0f64 / 3.0).sqrt()).abs() < 1e-6);
    assert!(r.all_hold());
}
