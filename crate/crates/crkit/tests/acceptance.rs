//! Acceptance criteria 1 to 10. Each test prints one `criterion N: PASS|FAIL`
//! line (bypassing output capture) before asserting.

use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use crkit::specs::CurveSpec;
use crkit::Rayon;
use crkit_core::almost_complex::{
    ab_from_beta, beta_from_ab, counterexample_curve, counterexample_structure, eigenframe, j_matrix_from_beta,
    jholo_residual_field, nonvanishing_branch_curve, q_matrix, quadratic_structure, zero_branch_curve,
    AlmostComplexStructure, CurveParam, RealMatrix,
};
use crkit_core::counterexample::{big_v, blowup_sequence, blowup_value, bound_b2, CounterexampleParams};
use crkit_core::grid::{cr_residual, green_check, Bounds};
use crkit_core::separable::{
    multiplicity_rhs, power_antiderivative, solve_multiplicity_example, solve_nonvanishing, solve_simple_zero,
    verify_implicit_formula, AnalyticMap, SolutionHandle, ZFn,
};
use crkit_core::series::{normal_form_h, verify_normal_form, LaurentSeries, PowerSeries};
use crkit_core::transforms::{cauchy_transform_with, sigma_function_with, verify_transform_identities_with};
use crkit_core::{c64, GridFunction, GridGeometry, ResidualReport, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn verdict(n: u32, ok: bool, detail: &str) {
    let line = format!("criterion {n}: {} ({detail})\n", if ok { "PASS" } else { "FAIL" });
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
}

fn within(t: Instant, secs: u64) -> (bool, Duration) {
    let e = t.elapsed();
    (e < Duration::from_secs(secs), e)
}

fn zbar() -> ZFn {
    std::sync::Arc::new(|z: C64| z.conj())
}

/// Second order under one halving, or already at the rounding floor.
fn second_order(coarse: f64, fine: f64) -> bool {
    fine < 1e-12 || coarse / fine >= 3.0
}

#[test]
fn criterion_01_blowup_values() {
    let t = Instant::now();
    let params = CounterexampleParams::default();
    let mut worst = 0.0f64;
    let mut real = true;
    for k in 1..=5 {
        let b = blowup_sequence(&params, k).unwrap();
        let expected = blowup_value(k);
        worst = worst.max((b.dz.re - expected).abs() / expected);
        real &= b.dz.im.abs() <= 1e-9 * expected;
    }
    let (fast, elapsed) = within(t, 1);

    let out = Command::new(env!("CARGO_BIN_EXE_crkit"))
        .args(["counterexample", "blowup", "--k", "1..5", "--format", "csv"])
        .output()
        .unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap_or_default().split(',').collect();
    let col = header.iter().position(|h| *h == "dzV");
    let mut cli_worst = f64::INFINITY;
    if let Some(col) = col {
        cli_worst = 0.0;
        for (k, line) in (1..).zip(lines) {
            let v: f64 = line.split(',').nth(col).unwrap().parse().unwrap();
            cli_worst = cli_worst.max((v - blowup_value(k)).abs() / blowup_value(k));
        }
    }
    let ok = worst <= 1e-9 && real && fast && out.status.code() == Some(0) && cli_worst <= 1e-9;
    verdict(1, ok, &format!("max rel err {worst:.2e}, csv dzV rel err {cli_worst:.2e}, real {real}, {elapsed:?}"));
    assert!(ok);
}

#[test]
fn criterion_02_dbar_bound_on_disks() {
    let t = Instant::now();
    let params = CounterexampleParams::default();
    let b2 = bound_b2();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let total = 1_000_000usize;
    let mut global = 0.0f64;
    let mut per_disk_ok = true;
    let mut detail = String::new();
    for k in 1..=6u32 {
        let n = total / 6 + usize::from((k as usize) <= total % 6);
        let (c, r) = (CounterexampleParams::center(k), CounterexampleParams::small_r(k));
        let mut m = 0.0f64;
        for _ in 0..n {
            let rho = r * rng.random::<f64>().sqrt();
            let theta = std::f64::consts::TAU * rng.random::<f64>();
            m = m.max(big_v(&params, c + C64::from_polar(rho, theta)).jet.dbar.norm());
        }
        let bound = b2 * 0.5f64.powi(k as i32);
        per_disk_ok &= m <= bound;
        detail.push_str(&format!("k={k}: {:.4} of bound; ", m / bound));
        global = global.max(m);
    }
    let (fast, elapsed) = within(t, 30);
    let ok = per_disk_ok && global <= b2 && fast;
    verdict(2, ok, &format!("{detail}global {global:.4} <= B2 {b2:.4}, {elapsed:?}"));
    assert!(ok);
}

#[test]
fn criterion_03_green_identity() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst_ratio = f64::INFINITY;
    for _ in 0..20 {
        // sum_{j+l<=3} a_jl z^j zbar^l + c exp(b zbar + d z)
        let mut terms = Vec::new();
        for j in 0..=3i32 {
            for l in 0..=(3 - j) {
                terms.push((j, l, C64::from_polar(rng.random::<f64>(), std::f64::consts::TAU * rng.random::<f64>())));
            }
        }
        let mut unit = || C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let (c, b, d) = (unit(), unit(), unit() * 0.5);
        let v = move |z: C64| {
            terms.iter().map(|&(j, l, a)| a * z.powi(j) * z.conj().powi(l)).sum::<C64>() + c * (b * z.conj() + d * z).exp()
        };
        let disc: Vec<f64> = [0.04, 0.02, 0.01]
            .iter()
            .map(|&h| {
                let geom = GridGeometry::covering(c64(-1.0 - h, -1.0 - h), c64(1.0 + h, 1.0 + h), h).unwrap();
                let g = GridFunction::sample(geom, &v).unwrap();
                let rect = geom.nodes_within(Bounds::new(c64(-1.0, -1.0), c64(1.0, 1.0))).unwrap();
                green_check(&g, rect).unwrap().discrepancy
            })
            .collect();
        worst_ratio = worst_ratio.min(disc[0] / disc[1]).min(disc[1] / disc[2]);
    }
    let (fast, elapsed) = within(t, 20);
    let ok = worst_ratio >= 3.0 && fast;
    verdict(3, ok, &format!("worst per-halving ratio {worst_ratio:.3} over 20 functions, {elapsed:?}"));
    assert!(ok);
}

#[test]
fn criterion_04_cauchy_transform() {
    let t = Instant::now();
    let exec = Rayon::from_env();
    let disk_err = |h: f64| {
        let geom = GridGeometry::centered(C64::default(), 1.0 + 2.0 * h, h).unwrap();
        let p = GridFunction::sample(geom, |z| if z.norm() <= 1.0 { c64(1.0, 0.0) } else { C64::default() }).unwrap();
        let c = cauchy_transform_with(&p, None, &exec).unwrap();
        c.grid.iter_unmasked().filter(|(z, _)| z.norm() <= 0.8).map(|(z, v)| (v - z.conj()).norm()).fold(0.0, f64::max)
    };
    let (d1, d2) = (disk_err(0.02), disk_err(0.01));
    let gauss = |h: f64| {
        let s = 0.25f64;
        let cut = (-8.0f64).exp();
        let geom = GridGeometry::centered(C64::default(), 1.0 + 2.0 * h, h).unwrap();
        let p = GridFunction::sample(geom, |z| c64(((-z.norm_sqr() / (2.0 * s * s)).exp() - cut).max(0.0), 0.0)).unwrap();
        verify_transform_identities_with(&p, &exec).unwrap().0.max_abs
    };
    let (g1, g2) = (gauss(0.02), gauss(0.01));
    let (fast, elapsed) = within(t, 60);
    let ok = d2 < 0.02 && d1 / d2 >= 1.8 && g1 / g2 >= 1.8 && fast;
    verdict(
        4,
        ok,
        &format!(
            "disk err {d2:.3e} at h=0.01, ratio {:.2}; gaussian identity ratio {:.2}; {elapsed:?}",
            d1 / d2,
            g1 / g2
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_05_normal_form_recursion() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let order = 16;
    let mut worst = 0.0f64;
    let mut failures = 0;
    for _ in 0..100 {
        let deg = rng.random_range(2..=8);
        // stored at order 16 so the check runs through degree 16
        let mut c = vec![C64::default(); order + 1];
        for cj in c.iter_mut().take(deg + 1).skip(2) {
            *cj = C64::from_polar(rng.random::<f64>().sqrt(), std::f64::consts::TAU * rng.random::<f64>());
        }
        c[1] = C64::from_polar(rng.random_range(0.5..=2.0), std::f64::consts::TAU * rng.random::<f64>());
        let f = PowerSeries::new(C64::default(), c).unwrap();
        let r = verify_normal_form(&f, &normal_form_h(&f, order).unwrap(), order).unwrap();
        worst = worst.max(r);
        failures += usize::from(r >= 1e-10);
    }
    let quad = PowerSeries::new(C64::default(), vec![C64::default(), c64(1.0, 0.0), c64(1.0, 0.0)]).unwrap();
    let h = normal_form_h(&quad, order).unwrap();
    let closed = (0..=order).map(|j| (h.coeff(j) - if j == 0 { 0.0 } else { 1.0 }).norm()).fold(0.0, f64::max);
    let (fast, elapsed) = within(t, 5);
    let ok = failures == 0 && closed <= 1e-12 && fast;
    verdict(
        5,
        ok,
        &format!("{failures}/100 above 1e-10, worst {worst:.3e}; closed form max dev {closed:.1e}; {elapsed:?}"),
    );
    assert!(ok);
}

fn family_ratio(sol: &SolutionHandle, rhs: impl Fn(C64, C64) -> Option<C64>, region: impl Fn(f64) -> GridGeometry, keep: impl Fn(C64) -> bool) -> (f64, f64) {
    let res = |h: f64| {
        let u = GridFunction::sample_partial(region(h), |z| keep(z).then(|| sol.eval(z).ok()).flatten()).unwrap();
        cr_residual(&u, &rhs).unwrap().max_abs
    };
    (res(0.01), res(0.005))
}

#[test]
fn criterion_06_solution_families() {
    let t = Instant::now();
    let mut results = Vec::new();

    // u_zbar = e^u, v = -ln(1 - 2x) on x < 0.4
    let exp = AnalyticMap::Exp { a: c64(-1.0, 0.0), b: c64(-1.0, 0.0), c: C64::default() };
    let sol = solve_nonvanishing(exp, zbar(), C64::default(), C64::default(), AnalyticMap::identity()).unwrap();
    let exact_ok = (sol.eval(c64(0.2, 0.3)).unwrap() - c64(-(0.6f64).ln(), 0.0)).norm() < 1e-10;
    let r = family_ratio(
        &sol,
        |_, u| Some(u.exp()),
        |h| GridGeometry::covering(c64(-0.4, -0.4), c64(0.36, 0.4), h).unwrap(),
        |_| true,
    );
    results.push(("log", r));

    for m in [1, 2] {
        let sol = solve_multiplicity_example(0.5, m, AnalyticMap::constant(c64(1.0, 0.0)), C64::default()).unwrap();
        let r = family_ratio(
            &sol,
            |z, u| multiplicity_rhs(0.5, z, u),
            |h| GridGeometry::centered(C64::default(), 0.5, h).unwrap(),
            |z| z.norm() > 0.1 && z.norm() < 0.5,
        );
        results.push((if m == 1 { "alpha=1/2 m=1" } else { "alpha=1/2 m=2" }, r));
    }

    let sol = solve_multiplicity_example(1.0, 1, AnalyticMap::constant(c64(1.0, 0.0)), c64(1.0, 0.0)).unwrap();
    let r = family_ratio(&sol, |_, u| Some(u * u), |h| GridGeometry::centered(c64(1.0, 0.0), 0.5, h).unwrap(), |_| true);
    results.push(("u^2", r));

    let quad = PowerSeries::new(C64::default(), vec![C64::default(), c64(1.0, 0.0), c64(1.0, 0.0)]).unwrap();
    let z0 = c64(0.05, 0.02);
    let sol = solve_simple_zero(&quad, zbar(), z0, C64::default(), AnalyticMap::shift(z0), 16).unwrap();
    let r = family_ratio(
        &sol,
        |_, u| Some(u + u * u),
        |h| GridGeometry::centered(z0, 0.25, h).unwrap(),
        |z| (z - z0).norm() <= 0.2,
    );
    results.push(("w+w^2", r));

    let (fast, elapsed) = within(t, 60);
    let ok = exact_ok && fast && results.iter().all(|(_, (a, b))| a / b >= 3.0);
    let detail: Vec<String> = results.iter().map(|(n, (a, b))| format!("{n}: {b:.2e} ratio {:.2}", a / b)).collect();
    verdict(6, ok, &format!("{}; {elapsed:?}", detail.join(", ")));
    assert!(ok);
}

#[test]
fn criterion_07_implicit_round_trip() {
    let t = Instant::now();
    let alpha = 0.5;
    let sol = solve_multiplicity_example(alpha, 1, AnalyticMap::constant(c64(1.0, 0.0)), C64::default()).unwrap();
    let big_f = AnalyticMap::LaurentPoly(LaurentSeries::new(C64::default(), -1, vec![c64(-1.0, 0.0)]));
    let run = |h: f64| {
        let geom = GridGeometry::centered(C64::default(), 0.3, h).unwrap();
        let u = GridFunction::sample_partial(geom, |z| (z.norm() <= 0.3).then(|| sol.eval(z).ok()).flatten()).unwrap();
        verify_implicit_formula(&u, &big_f, |z| power_antiderivative(alpha, z), C64::default(), None).unwrap()
    };
    let fine = run(0.005);
    let dev = fine.phi.iter_unmasked().map(|(_, p)| (p - 1.0).norm()).fold(0.0, f64::max);
    let coarse = run(0.01);
    let (a, b) = (coarse.report.max_abs, fine.report.max_abs);
    // phi is analytically constant, so O(h^2) is checked as a bound with constant 1
    let order_ok = a <= 0.01f64.powi(2) && b <= 0.005f64.powi(2);
    let (fast, elapsed) = within(t, 30);
    let ok = fine.m == 1 && dev < 0.01 && order_ok && fast;
    verdict(7, ok, &format!("M={}, max|phi-1| {dev:.2e}, holomorphy residual {a:.2e} -> {b:.2e}; {elapsed:?}", fine.m));
    assert!(ok);
}

#[test]
fn criterion_08_matrix_identities() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut sq, mut recon, mut round, mut q_ok) = (0.0f64, 0.0f64, 0.0f64, true);
    for _ in 0..10_000 {
        let b1 = C64::from_polar(0.95 * rng.random::<f64>().sqrt(), std::f64::consts::TAU * rng.random::<f64>());
        let b2 = C64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let j = j_matrix_from_beta(b1, b2).unwrap();
        sq = sq.max((j * j + RealMatrix::identity()).abs().max());
        let frame = eigenframe(b1, b2).unwrap();
        recon = recon.max((frame.reconstruct() - j.map(C64::from)).map(|z| z.norm()).max());
        let (c1, c2) = beta_from_ab(ab_from_beta(b1, b2).unwrap()).unwrap();
        round = round.max((c1 - b1).norm()).max((c2 - b2).norm());
        let q = q_matrix(b1, b2);
        q_ok &= q[(0, 0)] == C64::default() && q[(1, 0)] == C64::default();
    }
    let (fast, elapsed) = within(t, 10);
    let ok = sq <= 1e-12 && recon <= 1e-10 && round <= 1e-12 && q_ok && fast;
    verdict(
        8,
        ok,
        &format!("J^2+I {sq:.1e}, PDP^-1-J {recon:.1e}, round trip {round:.1e}, Q col0 zero {q_ok}; {elapsed:?}"),
    );
    assert!(ok);
}

fn jholo_pair(
    curve: &CurveParam,
    acs: &AlmostComplexStructure,
    geom: impl Fn(f64) -> GridGeometry,
    hs: (f64, f64),
    exclude: impl Fn(C64) -> bool,
) -> (f64, f64) {
    let res = |h: f64| {
        let field = jholo_residual_field(curve, acs, geom(h)).unwrap().map(|z, r| (!exclude(z)).then_some(r));
        ResidualReport::of_field(&field).unwrap().max_abs
    };
    (res(hs.0), res(hs.1))
}

#[test]
fn criterion_09_j_holomorphic_curves() {
    let t = Instant::now();
    let quad = quadratic_structure();
    let square = |half: f64| move |h: f64| GridGeometry::centered(C64::default(), half, h).unwrap();
    let hole = |c: C64, r: f64| move |z: C64| (z - c).norm() < r;
    let mut rows = Vec::new();

    let fiber = CurveParam::fiber(c64(0.3, 0.2));
    rows.push(("(z,c)", jholo_pair(&fiber, &quad, square(0.5), (0.02, 0.01), hole(c64(0.1, 0.0), 0.1))));
    let graph = CurveParam::holomorphic_graph(AnalyticMap::Exp { a: c64(1.0, 0.0), b: c64(1.0, 1.0), c: C64::default() }, c64(0.5, -0.2));
    rows.push(("(h(z),c)", jholo_pair(&graph, &quad, square(0.5), (0.02, 0.01), hole(c64(0.1, 0.0), 0.1))));

    let id = AnalyticMap::identity;
    let one = || AnalyticMap::constant(c64(1.0, 0.0));
    let zero_branch = zero_branch_curve(1, one(), id(), C64::default()).unwrap();
    let pole = c64(-2f64.cbrt(), 0.0);
    rows.push(("zero branch", jholo_pair(&zero_branch, &quad, square(1.5), (0.02, 0.01), hole(pole, 0.3))));
    let nonvanishing = nonvanishing_branch_curve(id(), id(), C64::default(), c64(1.0, 0.0)).unwrap();
    // poles where conj(z^2/2) + z - 1 = 0
    let den = |z: C64| (z * z * 0.5).conj() + z - 1.0;
    rows.push((
        "nonvanishing branch",
        jholo_pair(&nonvanishing, &quad, square(1.0), (0.02, 0.01), move |z| den(z).norm() < 0.3),
    ));

    let params = CounterexampleParams::default();
    let v_curve = counterexample_curve(params, AnalyticMap::constant(C64::default()), id());
    let c1 = CounterexampleParams::center(1);
    rows.push((
        "(V(z),z)",
        jholo_pair(
            &v_curve,
            &counterexample_structure(params),
            |h| GridGeometry::centered(c1, 0.012, h).unwrap(),
            (1e-4, 5e-5),
            |_| false,
        ),
    ));

    let corrupted = zero_branch.conjugate_k();
    let geom = GridGeometry::centered(C64::default(), 0.5, 0.01).unwrap();
    let bad = ResidualReport::of_field(&jholo_residual_field(&corrupted, &quad, geom).unwrap()).unwrap().max_abs;

    let spec = r#"{"generator":"zero_branch","m":1,"phi":{"kind":"constant","c":[1,0]},"k":{"kind":"identity"},"z0":[0,0],"conjugate_k":true}"#;
    let _: CurveSpec = serde_json::from_str(spec).unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_crkit"))
        .args(["acs", "verify", "--curve", spec, "--structure", r#"{"kind":"quadratic"}"#, "--grid", "-0.5,-0.5,0.01,101,101"])
        .output()
        .unwrap()
        .status;

    let (fast, elapsed) = within(t, 60);
    let curves_ok = rows.iter().all(|(_, (a, b))| second_order(*a, *b));
    let ok = curves_ok && bad > 0.1 && status.code() == Some(2) && fast;
    let detail: Vec<String> = rows.iter().map(|(n, (a, b))| format!("{n}: {a:.2e} -> {b:.2e}")).collect();
    verdict(
        9,
        ok,
        &format!("{}; corrupted {bad:.2e}, cli exit {:?}; {elapsed:?}", detail.join(", "), status.code()),
    );
    assert!(ok);
}

#[test]
fn criterion_10_sigma_function() {
    let t = Instant::now();
    let exec = Rayon::from_env();
    let alpha = 0.5;
    let sol = solve_multiplicity_example(alpha, 1, AnalyticMap::constant(c64(1.0, 0.0)), C64::default()).unwrap();
    let mut residuals = Vec::new();
    let mut zeros_ok = true;
    let mut zero_count = 0;
    for h in [0.02, 0.01, 0.005] {
        let geom = GridGeometry::centered(C64::default(), 0.5, h).unwrap();
        let u = sol.sample(geom).unwrap();
        // u_zbar = A u with A = u |z|^(alpha-1)
        let a = |z: C64| {
            let r = z.norm();
            (r > 0.0).then(|| sol.eval(z).ok().map(|u| u * r.powf(alpha - 1.0))).flatten()
        };
        let sigma = sigma_function_with(&u, C64::default(), a, geom.bounds(), &exec).unwrap();
        let zeros = u.level_set(C64::default(), 0.0);
        zeros_ok &= !zeros.is_empty() && sigma.level_set(C64::default(), 0.0) == zeros;
        zero_count = zeros.len();
        // the density is cut off at the edge of the box; holomorphy is measured inside it
        let inner = sigma.with_excluded(|z| z.norm() > 0.25).unwrap();
        residuals.push(cr_residual(&inner, |_, _| Some(C64::default())).unwrap().max_abs);
    }
    let decreasing = residuals.windows(2).all(|w| w[1] < w[0]);
    let (fast, elapsed) = within(t, 60);
    let ok = decreasing && zeros_ok && fast;
    verdict(
        10,
        ok,
        &format!(
            "dbar(sigma) {}, zero set match {zeros_ok} ({zero_count} node); {elapsed:?}",
            residuals.iter().map(|r| format!("{r:.2e}")).collect::<Vec<_>>().join(" -> ")
        ),
    );
    assert!(ok);
}
