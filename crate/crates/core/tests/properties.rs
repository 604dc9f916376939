use crkit_core::almost_complex::{ab_from_beta, beta_from_ab, eigenframe, j_matrix_from_beta, q_matrix, AbParams};
use crkit_core::counterexample::{big_v, blowup_sequence, bound_b2, vt, CounterexampleParams};
use crkit_core::grid::{cr_residual, dbar, dz, green_check, Bounds};
use crkit_core::series::{
    build_bivariate_f, normal_form_h, primitive_laurent, reciprocal_laurent, solve_h_recursion, LaurentSeries,
    PowerSeries,
};
use crkit_core::transforms::{cauchy_transform, sigma_function};
use crkit_core::{c64, GridFunction, GridGeometry, C64};
use nalgebra::Matrix4;
use proptest::prelude::*;

fn complex(r: f64) -> impl Strategy<Value = C64> {
    (-r..r, -r..r).prop_map(|(a, b)| c64(a, b))
}

fn square(h: f64) -> GridGeometry {
    GridGeometry::covering(c64(-1.0, -1.0), c64(1.0, 1.0), h).unwrap()
}

/// Polynomial `sum c_ab z^a zbar^b` with `a + b <= 5`, listed as `(a, b, c)`.
fn mixed_poly() -> impl Strategy<Value = Vec<(u32, u32, C64)>> {
    let terms: Vec<(u32, u32)> = (0..=5u32).flat_map(|a| (0..=5 - a).map(move |b| (a, b))).collect();
    proptest::collection::vec(complex(1.0), terms.len())
        .prop_map(move |cs| terms.iter().zip(cs).map(|(&(a, b), c)| (a, b, c)).collect())
}

fn eval_mixed(p: &[(u32, u32, C64)], z: C64) -> C64 {
    p.iter().map(|&(a, b, c)| c * z.powu(a) * z.conj().powu(b)).sum()
}

fn dbar_mixed(p: &[(u32, u32, C64)], z: C64) -> C64 {
    p.iter()
        .filter(|t| t.1 > 0)
        .map(|&(a, b, c)| c * b as f64 * z.powu(a) * z.conj().powu(b - 1))
        .sum()
}

fn max_err(field: &GridFunction, exact: impl Fn(C64) -> C64) -> f64 {
    field.iter_unmasked().map(|(z, v)| (v - exact(z)).norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn dbar_is_linear(a in complex(2.0), b in complex(2.0), p in complex(1.0), q in complex(1.0)) {
        let geom = square(0.1);
        let g1 = GridFunction::sample(geom, |z| (p * z).exp() + z.conj() * z).unwrap();
        let g2 = GridFunction::sample(geom, |z| (z.conj() * q).sin()).unwrap();
        let combo = g1.zip_with(&g2, |x, y| a * x + b * y).unwrap();
        let lhs = dbar(&combo).unwrap();
        let rhs = dbar(&g1).unwrap().zip_with(&dbar(&g2).unwrap(), |x, y| a * x + b * y).unwrap();
        let scale = 1.0 + lhs.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
        let diff = lhs.zip_with(&rhs, |x, y| x - y).unwrap();
        prop_assert!(diff.iter_unmasked().all(|(_, d)| d.norm() <= 1e-12 * scale));
    }

    #[test]
    fn conjugation_swaps_derivatives(p in complex(1.5)) {
        let g = GridFunction::sample(square(0.1), |z| (p * z + z.conj() * z.conj()).exp()).unwrap();
        let lhs = dbar(&g.conj()).unwrap();
        let rhs = dz(&g).unwrap().conj();
        let diff = lhs.zip_with(&rhs, |x, y| x - y).unwrap();
        prop_assert!(diff.iter_unmasked().all(|(_, d)| d.norm() <= 1e-13 * (1.0 + rhs.values().iter().map(|v| v.norm()).fold(0.0, f64::max))));
    }

    #[test]
    fn dbar_stencil_is_second_order(p in mixed_poly()) {
        let errs: Vec<f64> = [0.05, 0.025]
            .iter()
            .map(|&h| {
                let g = GridFunction::sample(square(h), |z| eval_mixed(&p, z)).unwrap();
                max_err(&dbar(&g).unwrap(), |z| dbar_mixed(&p, z))
            })
            .collect();
        // a stencil that is exact for this polynomial leaves only rounding
        prop_assert!(errs[0] < 1e-10 || errs[0] / errs[1] >= 3.5, "{errs:?}");
    }

    #[test]
    fn quadratic_holomorphic_residual_vanishes(a in complex(1.0), b in complex(1.0), c in complex(1.0)) {
        let g = GridFunction::sample(square(0.01), |z| a + b * z + c * z * z).unwrap();
        prop_assert!(cr_residual(&g, |_, _| Some(C64::default())).unwrap().max_abs < 1e-10);
    }

    #[test]
    fn holomorphic_residual_is_sixth_of_third_derivative(cs in proptest::collection::vec(complex(1.0), 6)) {
        // for holomorphic f the centered stencil gives dbar f = h^2 f''' / 6 + O(h^4)
        let h = 0.01;
        let f = |z: C64| cs.iter().enumerate().map(|(n, c)| c * z.powu(n as u32)).sum::<C64>();
        let f3 = |z: C64| {
            cs.iter().enumerate().skip(3).map(|(n, c)| c * (n * (n - 1) * (n - 2)) as f64 * z.powu(n as u32 - 3)).sum::<C64>()
        };
        let g = GridFunction::sample(square(h), f).unwrap();
        let r = dbar(&g).unwrap();
        prop_assert!(max_err(&r, |z| f3(z) * (h * h / 6.0)) < 1e-8);
    }

    #[test]
    fn green_discrepancy_is_second_order(a in complex(1.0), b in complex(1.0), p in mixed_poly()) {
        let f = |z: C64| (a * z + b * z.conj()).exp() + eval_mixed(&p, z) * 0.3;
        let d: Vec<f64> = [0.04, 0.02]
            .iter()
            .map(|&h| {
                let geom = square(h);
                let g = GridFunction::sample(geom, f).unwrap();
                let rect = geom.nodes_within(Bounds::new(c64(-0.8, -0.8), c64(0.8, 0.8))).unwrap();
                green_check(&g, rect).unwrap().discrepancy
            })
            .collect();
        prop_assert!(d[0] < 1e-11 || d[0] / d[1] >= 3.0, "{d:?}");
    }

    #[test]
    fn cauchy_is_linear(a in complex(2.0), b in complex(2.0), s in 0.2f64..0.5) {
        let geom = GridGeometry::centered(C64::default(), 1.0, 0.1).unwrap();
        let p1 = GridFunction::sample(geom, |z| c64((1.0 - z.norm_sqr() / (s * s)).max(0.0), 0.0)).unwrap();
        let p2 = GridFunction::sample(geom, |z| if z.re > 0.0 && z.norm() < 0.7 { z } else { C64::default() }).unwrap();
        let combo = p1.zip_with(&p2, |x, y| a * x + b * y).unwrap();
        let c1 = cauchy_transform(&p1, None).unwrap().grid;
        let c2 = cauchy_transform(&p2, None).unwrap().grid;
        let cc = cauchy_transform(&combo, None).unwrap().grid;
        for k in 0..geom.len() {
            let want = a * c1.values()[k] + b * c2.values()[k];
            prop_assert!((cc.values()[k] - want).norm() <= 1e-12 * (1.0 + want.norm()));
        }
    }

    #[test]
    fn cauchy_far_field_decay(c in complex(1.0), s in 0.3f64..0.9) {
        let h = 0.1;
        let geom = GridGeometry::centered(C64::default(), 1.0, h).unwrap();
        // cells lie inside the unit disk
        let p = GridFunction::sample(geom, |z| if z.norm() <= 1.0 - h { c * (1.0 - z.norm() / s).max(0.0) + c64(0.2, 0.0) } else { C64::default() }).unwrap();
        let l1: f64 = p.values().iter().map(|v| v.norm()).sum::<f64>() * h * h;
        let target = GridGeometry::centered(C64::default(), 4.0, 0.5).unwrap();
        let out = cauchy_transform(&p, Some(target)).unwrap().grid;
        for k in 0..target.len() {
            let z = target.point_at(k);
            if z.norm() > 2.0 {
                prop_assert!(out.values()[k].norm() <= l1 / (std::f64::consts::PI * (z.norm() - 1.0)));
            }
        }
    }

    #[test]
    fn cauchy_commutes_with_grid_translation(i in -5i32..5, j in -5i32..5) {
        let h = 0.1;
        let shift = c64(i as f64 * h, j as f64 * h);
        let base = GridGeometry::centered(C64::default(), 0.8, h).unwrap();
        let moved = GridGeometry::centered(shift, 0.8, h).unwrap();
        let bump = |z: C64| c64((1.0 - z.norm_sqr() / 0.36).max(0.0), z.im);
        let p0 = GridFunction::sample(base, bump).unwrap();
        let p1 = GridFunction::sample(moved, |z| bump(z - shift)).unwrap();
        let c0 = cauchy_transform(&p0, None).unwrap().grid;
        let c1 = cauchy_transform(&p1, None).unwrap().grid;
        for k in 0..base.len() {
            prop_assert!((c0.values()[k] - c1.values()[k]).norm() < 1e-12);
        }
    }

    #[test]
    fn sigma_vanishes_exactly_on_zero_set(i in 2usize..14, j in 2usize..14, w0 in complex(1.0)) {
        let geom = GridGeometry::centered(C64::default(), 0.8, 0.1).unwrap();
        let a = geom.point(i, j);
        let u = GridFunction::sample(geom, |z| w0 + (z - a) * (z + c64(0.05, 0.02)).exp()).unwrap();
        let sigma = sigma_function(&u, w0, |_| Some(c64(0.5, -0.25)), geom.bounds()).unwrap();
        for k in 0..geom.len() {
            let zero = u.values()[k] == w0;
            prop_assert_eq!(sigma.values()[k] == C64::default(), zero);
        }
    }

    #[test]
    fn reciprocal_times_series_is_one(cs in proptest::collection::vec(complex(1.0), 10), k in 0usize..3) {
        let mut coeffs = vec![C64::default(); k];
        coeffs.push(c64(0.5, 0.0) + cs[0]);
        coeffs.extend_from_slice(&cs[1..]);
        let f = PowerSeries::new(C64::default(), coeffs).unwrap();
        prop_assume!(f.coeff(k).norm() > 0.1);
        let q = reciprocal_laurent(&f, k).unwrap();
        let prod = f.to_laurent().mul(&q).unwrap();
        let n = f.order() - k;
        for e in 0..=n as i64 {
            let want = if e == 0 { 1.0 } else { 0.0 };
            let got = prod.coeff(e).unwrap_or_default();
            prop_assert!((got - want).norm() < 1e-9 * (1.0 + q.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max)), "{e} {got}");
        }
    }

    #[test]
    fn primitive_then_derivative_is_identity(cs in proptest::collection::vec(complex(1.0), 8), lo in -4i64..0) {
        let mut coeffs = cs.clone();
        let residue_slot = (-1 - lo) as usize;
        if residue_slot < coeffs.len() {
            coeffs[residue_slot] = C64::default();
        }
        let l = LaurentSeries::new(c64(0.2, 0.1), lo, coeffs);
        let back = primitive_laurent(&l).unwrap().differentiate();
        for e in l.min_index()..=l.top_index() {
            prop_assert!((back.coeff(e).unwrap_or_default() - l.coeff(e).unwrap()).norm() < 1e-14);
        }
    }

    #[test]
    fn recursion_low_coefficients_do_not_depend_on_order(cs in proptest::collection::vec(complex(1.0), 8), f1 in complex(2.0)) {
        prop_assume!(f1.norm() > 0.3);
        let mut coeffs = vec![C64::default(), f1];
        coeffs.extend_from_slice(&cs);
        let f = PowerSeries::new(C64::default(), coeffs).unwrap();
        let big = build_bivariate_f(&f).unwrap();
        let h8 = solve_h_recursion(&big, 8);
        let h16 = solve_h_recursion(&big, 16);
        for n in 0..=8 {
            prop_assert_eq!(h8.coeff(n), h16.coeff(n));
        }
        let h = normal_form_h(&f, 16).unwrap();
        prop_assert_eq!(h.coeff(0), f.center);
        prop_assert_eq!(h.coeff(1), c64(1.0, 0.0));
    }

    #[test]
    fn v_is_zero_off_first_quadrant(x in -0.2f64..0.2, y in -0.2f64..0.2) {
        prop_assume!(x <= 0.0 || y <= 0.0);
        let e = big_v(&CounterexampleParams::default(), c64(x, y));
        prop_assert_eq!(e.jet.value, C64::default());
        prop_assert_eq!(e.jet.dbar, C64::default());
    }

    #[test]
    fn v_over_z_vanishes_toward_origin(theta in 0.0f64..std::f64::consts::FRAC_PI_2, t in 0.0f64..1.0) {
        let p = CounterexampleParams::default();
        for k in 1..=10u32 {
            let z = CounterexampleParams::center(k) + c64(theta.cos(), theta.sin()) * (t * CounterexampleParams::small_r(k));
            let e = big_v(&p, z);
            let bound = 0.5f64.powi(k as i32) * (-0.5f64).exp() / (1.0 - (-0.5f64).exp());
            prop_assert!(e.jet.value.norm() / z.norm() <= bound);
            prop_assert!(e.jet.dbar.norm() <= 0.5f64.powi(k as i32) * bound_b2());
        }
    }

    #[test]
    fn vt_is_bounded(r in 0.0f64..1.0, theta in 0.0f64..6.3, t in 1e-9f64..=0.5) {
        let j = vt(C64::from_polar(r, theta), t).unwrap();
        prop_assert!(j.value.norm() <= (-0.5f64).exp() + 1e-15);
        prop_assert!(j.dbar.norm() <= bound_b2());
    }

    #[test]
    fn structure_identities(r1 in 0.0f64..0.95, t1 in 0.0f64..6.3, b2 in complex(2.0)) {
        let b1 = C64::from_polar(r1, t1);
        let j = j_matrix_from_beta(b1, b2).unwrap();
        let sq = j * j + Matrix4::identity();
        prop_assert!(sq.iter().all(|x| x.abs() < 1e-12));
        let f = eigenframe(b1, b2).unwrap();
        let jc = j.map(|x| c64(x, 0.0));
        prop_assert!((f.reconstruct() - jc).iter().all(|x| x.norm() < 1e-10));
        let (c1, c2) = beta_from_ab(ab_from_beta(b1, b2).unwrap()).unwrap();
        prop_assert!((c1 - b1).norm() < 1e-12 && (c2 - b2).norm() < 1e-12);
        let q = q_matrix(b1, b2);
        prop_assert!(q[(0, 0)] == C64::default() && q[(1, 0)] == C64::default());
    }

    #[test]
    fn ab_round_trip(a1 in -2.0f64..2.0, a2 in -2.0f64..2.0, b1 in -0.5f64..0.5, b2 in -0.5f64..0.5) {
        let p = AbParams { a1, a2, b1, b2 };
        let (x, y) = beta_from_ab(p).unwrap();
        let q = ab_from_beta(x, y).unwrap();
        prop_assert!((p.a1 - q.a1).abs() < 1e-12 && (p.a2 - q.a2).abs() < 1e-12);
        prop_assert!((p.b1 - q.b1).abs() < 1e-12 && (p.b2 - q.b2).abs() < 1e-12);
    }
}

#[test]
fn blowup_derivatives_double() {
    let p = CounterexampleParams::new(20).unwrap();
    let vals: Vec<f64> = (1..=20).map(|k| blowup_sequence(&p, k).unwrap().dz.re).collect();
    for w in vals.windows(2) {
        assert!((w[1] / w[0] - 2.0).abs() < 1e-9);
    }
}

#[test]
fn v_finite_differences_match_jets() {
    let p = CounterexampleParams::default();
    for k in 1..=4u32 {
        let c = CounterexampleParams::center(k);
        let r = CounterexampleParams::small_r(k);
        let step = 1e-3 * r;
        for (i, rho) in [0.1, 0.3, 0.45, 0.55].iter().enumerate() {
            let z = c + C64::from_polar(rho * r, 0.7 + i as f64);
            let f = |w: C64| big_v(&p, w).jet.value;
            let fx = (f(z + step) - f(z - step)) / (2.0 * step);
            let fy = (f(z + c64(0.0, step)) - f(z - c64(0.0, step))) / (2.0 * step);
            let jet = big_v(&p, z).jet;
            let scale = jet.dz.norm().max(jet.dbar.norm());
            assert!(((fx - c64(0.0, 1.0) * fy) * 0.5 - jet.dz).norm() < 1e-4 * scale, "k={k}");
            assert!(((fx + c64(0.0, 1.0) * fy) * 0.5 - jet.dbar).norm() < 1e-4 * scale, "k={k}");
        }
    }
}
