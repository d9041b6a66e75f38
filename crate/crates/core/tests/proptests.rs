mod common;

use common::*;
use proptest::prelude::*;
use qprenorm_core::dynamics::{
    f_iter, richardson_intercept, richardson_slope, BoundaryPoint, Classification, INDICATOR_TOL,
};
use qprenorm_core::families::FlmRaw;
use qprenorm_core::qprenorm::double_angle;
use qprenorm_core::*;

fn trig(values: &[f64]) -> PeriodicFn {
    let mut c = vec![Complex64::new(values[0], 0.0)];
    for pair in values[1..].chunks(2) {
        c.push(Complex64::new(pair[0], pair.get(1).copied().unwrap_or(0.0)));
    }
    PeriodicFn::new(c)
}

fn inner_map(p: &[f64], degree: usize) -> AnalyticMap1D {
    // g(z) = 0.2 + sum p_j 0.25^(j-1) z^j stays well inside the default disc
    let mut c = vec![0.2];
    c.extend(p.iter().enumerate().map(|(j, v)| v * 0.25f64.powi(j as i32)));
    AnalyticMap1D::from_power_coeffs(cfg().disc, &c, degree)
}

fn qp_map(values: &[f64], k_theta: usize, degree: usize) -> QPMap {
    let mut it = values.iter().cycle();
    let modes = (0..=k_theta)
        .map(|_| {
            (0..=degree)
                .map(|j| {
                    let s = 1.0 / ((j + 1) * (j + 1)) as f64;
                    Complex64::new(it.next().unwrap() * s, it.next().unwrap() * s)
                })
                .collect()
        })
        .collect();
    QPMap::new(cfg().disc, modes).unwrap()
}

fn pair(values: &[f64]) -> ModePair {
    let (u, v) = values.split_at(values.len() / 2);
    ModePair::new(
        AnalyticMap1D::from_power_coeffs(cfg().disc, u, cfg().n_x),
        AnalyticMap1D::from_power_coeffs(cfg().disc, v, cfg().n_x),
        1,
    )
}

fn coeffs() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn periodic_samples_round_trip(v in prop::collection::vec(-1.0f64..1.0, 1..22)) {
        let g = trig(&v);
        let back = PeriodicFn::from_samples(&g.samples(64), g.k_max()).unwrap();
        prop_assert!(back.sub(&g).max_abs_coeff() < 1e-14);
    }

    #[test]
    fn shift_moves_the_argument(v in prop::collection::vec(-1.0f64..1.0, 1..22), s in -2.0f64..2.0, t in 0.0f64..1.0) {
        let g = trig(&v);
        prop_assert!((g.shift(s).eval(t) - g.eval(t + s)).abs() < 1e-12);
    }

    #[test]
    fn extrema_are_ordered_and_match_brute_force(v in prop::collection::vec(-1.0f64..1.0, 3..22)) {
        let g = trig(&v);
        let policy = ExtremumPolicy::default();
        let (lo, hi) = (min_theta(&g, &policy), max_theta(&g, &policy));
        prop_assert!(lo.value <= hi.value);
        let grid = 1 << 20;
        let (mut b_lo, mut b_hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for l in 0..grid {
            let y = g.eval(l as f64 / grid as f64);
            b_lo = b_lo.min(y);
            b_hi = b_hi.max(y);
        }
        prop_assert!((lo.value - b_lo).abs() < 1e-8, "{} vs {}", lo.value, b_lo);
        prop_assert!((hi.value - b_hi).abs() < 1e-8);
        prop_assert!((g.eval(lo.theta) - lo.value).abs() < 1e-12);
    }

    #[test]
    fn dmin_matches_one_sided_differences(v in prop::collection::vec(-0.2f64..0.2, 5), w in prop::collection::vec(-1.0f64..1.0, 5), phase in 0.0f64..1.0) {
        // a dominant first mode keeps the minimum unique and non-degenerate
        let g0 = trig(&v).add(&PeriodicFn::trig(1, 1.0, 0.0).shift(phase));
        let g1 = trig(&w);
        let policy = ExtremumPolicy::default();
        let d = dmin(&g0, &g1, &policy).unwrap();
        let t = 1e-6;
        let fd = (min_theta(&g0.axpy(t, &g1), &policy).value - min_theta(&g0, &policy).value) / t;
        prop_assert!((fd - d).abs() < 1e-4, "{fd} vs {d}");
    }

    #[test]
    fn compose_is_associative(f in prop::collection::vec(-1.0f64..1.0, 9), g in prop::collection::vec(-0.3f64..0.3, 8), h in prop::collection::vec(-0.3f64..0.3, 8)) {
        let degree = 64;
        let f = AnalyticMap1D::from_power_coeffs(cfg().disc, &f.iter().enumerate().map(|(j, v)| v / (j + 1) as f64).collect::<Vec<_>>(), degree);
        let (g, h) = (inner_map(&g, degree), inner_map(&h, degree));
        let nodes = 512;
        let left = f.compose(&g, nodes).unwrap().compose(&h, nodes).unwrap();
        let right = f.compose(&g.compose(&h, nodes).unwrap(), nodes).unwrap();
        prop_assert!(left.scaled_distance(&right) <= 1e-10, "{}", left.scaled_distance(&right));
    }

    #[test]
    fn p0_is_a_projection(v in coeffs()) {
        let g = qp_map(&v, 3, 6);
        let p = g.p0();
        let again = QPMap::uncoupled(&p, 3).p0();
        prop_assert_eq!(p.coeffs(), again.coeffs());
    }

    #[test]
    fn real_arguments_give_real_values(v in coeffs(), t in 0.0f64..1.0, x in -1.1f64..1.1) {
        let g = qp_map(&v, 3, 6);
        let z = g.eval(t, Complex64::new(x, 0.0)).unwrap();
        prop_assert!(z.im.abs() <= 1e-14 * (1.0 + z.re.abs()));
    }

    #[test]
    fn recentering_keeps_values(v in prop::collection::vec(-1.0f64..1.0, 6), x in -1.0f64..1.0) {
        let f = AnalyticMap1D::from_power_coeffs(cfg().disc, &v, 10);
        let g = f.recenter(DiscDomain::new(0.0, 1.3));
        prop_assert!((f.eval_real(x).unwrap() - g.eval_real(x).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn mode_pairs_round_trip(v in prop::collection::vec(-1.0f64..1.0, 8), k in 1usize..4) {
        let p = pair(&v);
        let p = ModePair::new(p.u, p.v, k);
        let back = ModePair::from_qpmap(&p.to_qpmap(4).unwrap(), k).unwrap();
        prop_assert!(back.scaled_distance(&p) < 1e-15);
    }

    #[test]
    fn rotations_form_a_group(v in prop::collection::vec(-1.0f64..1.0, 8), a in -1.0f64..1.0, b in -1.0f64..1.0) {
        let p = pair(&v);
        prop_assert!(r_gamma(a, &r_gamma(b, &p)).scaled_distance(&r_gamma(a + b, &p)) < 1e-14);
        prop_assert!(r_gamma(1.0, &p).scaled_distance(&p) < 1e-14);
    }

    #[test]
    fn l_omega_is_periodic_and_commutes_with_rotations(v in prop::collection::vec(-1.0f64..1.0, 8), w in 0.0f64..1.0, g in 0.0f64..1.0) {
        let psi = &phi().phi;
        let p = pair(&v);
        let a = l_omega(psi, w, &p).unwrap();
        prop_assert!(l_omega(psi, w + 1.0, &p).unwrap().scaled_distance(&a) < 1e-12);
        let lr = l_omega(psi, w, &r_gamma(g, &p)).unwrap();
        prop_assert!(lr.scaled_distance(&r_gamma(g, &a)) < 1e-12);
    }

    #[test]
    fn double_angle_stays_on_the_circle(w in -10.0f64..10.0) {
        let d = double_angle(w);
        prop_assert!((0.0..1.0).contains(&d));
        let diff = d - 2.0 * w;
        prop_assert!((diff - diff.round()).abs() < 1e-12);
    }

    #[test]
    fn iterates_compose(alpha in 2.9f64..3.5, eps in 0.0f64..0.05, t in 0.0f64..1.0, x in 0.2f64..0.8, m1 in 0usize..6, m2 in 0usize..6) {
        let f = FlmRaw { alpha, eps, forcing: Forcing::Multiplicative };
        let w = golden_mean();
        let (y, d1) = f_iter(&f, w, m1, t, x).unwrap();
        let (z, d2) = f_iter(&f, w, m2, t + m1 as f64 * w, y).unwrap();
        let (zz, dd) = f_iter(&f, w, m1 + m2, t, x).unwrap();
        prop_assert!((z - zz).abs() < 1e-12);
        prop_assert!((d1 * d2 - dd).abs() <= 1e-10 * (1.0 + dd.abs()));
    }

    #[test]
    fn classification_follows_the_sign_pattern(a in -1.0f64..1.0, b in -1.0f64..1.0) {
        let (min, max) = (a.min(b), a.max(b));
        let c = Classification::from_indicator(min, max, INDICATOR_TOL);
        let expected = if min.abs() <= INDICATOR_TOL && max > 0.0 {
            Classification::BoundaryPlus
        } else if max.abs() <= INDICATOR_TOL && min < 0.0 {
            Classification::BoundaryMinus
        } else if min * max > 0.0 {
            Classification::Reducible
        } else {
            Classification::Nonreducible
        };
        prop_assert_eq!(c, expected);
        if c == Classification::Reducible {
            prop_assert!(min.signum() == max.signum());
        }
    }

    #[test]
    fn richardson_is_exact_on_cubics(s in prop::collection::vec(-10.0f64..10.0, 4), base in 3.0f64..3.6, top in 1e-4f64..1e-2) {
        let pts: Vec<BoundaryPoint> = [1.0, 0.5, 0.25, 0.125]
            .iter()
            .map(|r| {
                let e = top * r;
                BoundaryPoint {
                    eps: e,
                    alpha: base + s[0] * e + s[1] * e * e + s[2] * e.powi(3) + s[3] * e.powi(4),
                    indicator_min: 0.0,
                    indicator_max: 0.0,
                    lyapunov: 0.0,
                }
            })
            .collect();
        let (slope, _) = richardson_slope(base, &pts);
        prop_assert!((slope - s[0]).abs() < 1e-7 * (1.0 + s[0].abs()), "{slope} vs {}", s[0]);
        let cubic: Vec<BoundaryPoint> = pts
            .iter()
            .map(|p| BoundaryPoint { alpha: base + s[0] * p.eps + s[1] * p.eps.powi(2) + s[2] * p.eps.powi(3), ..*p })
            .collect();
        prop_assert!((richardson_intercept(&cubic) - base).abs() < 1e-12);
    }
}
