//! Solution families of the separable equation `u_zbar = f(u) g(z)`.
//!
//! With `G` a zbar-antiderivative of `g`:
//!
//! * `f` nonvanishing near `w0`, `F' = 1/f`: `v = H(G(z) - G(z0) + C(z) + F(w0))`
//!   with `H` the local inverse of `F` and `C` holomorphic, `C(z0) = 0`.
//! * `f` with a simple zero at `w0`: `v = h(B(z) exp(f_1 G(z)))` with `h` the
//!   normal-form map from [`crate::series`] and `B` holomorphic, `B(z0) = 0`.
//! * `f(w) = w^2`, `g = |z|^(alpha-1)`: the closed form
//!   `u = -(z-z0)^m / (phi(z) + (z-z0)^m (2/(1+alpha)) zbar |z|^(alpha-1))`.
//!
//! For zeros of higher order the implicit relation
//! `(z-z0)^M F(u) = phi(z) + (z-z0)^M G(z)` is checked on grid samples.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::grid::{self, GridFunction, GridGeometry, ResidualReport};
use crate::math::{atan2, cabs, hypot, log, PI};
use crate::series::{normal_form_h, LaurentSeries, PowerSeries};
use crate::{c64, Error, Result, C64};

/// A callback `z -> value`, used for zbar-antiderivatives `G`.
pub type ZFn = Arc<dyn Fn(C64) -> C64 + Send + Sync>;

/// Holomorphic function with an exact derivative.
#[derive(Debug, Clone, PartialEq)]
pub enum AnalyticMap {
    /// `a exp(b w) + c`
    Exp { a: C64, b: C64, c: C64 },
    /// `a Log(b w)` with the cut along the ray `arg(b w) = cut`; the
    /// imaginary part of the logarithm lies in `(cut - 2 pi, cut)`.
    Log { a: C64, b: C64, cut: f64 },
    Polynomial(PowerSeries),
    LaurentPoly(LaurentSeries),
    /// Power series trusted only for `|w - center| < radius`.
    Series { series: PowerSeries, radius: f64 },
}

/// Angular distance under which a point counts as lying on a branch cut.
pub const CUT_TOL: f64 = 1e-12;

impl AnalyticMap {
    pub fn identity() -> Self {
        Self::Polynomial(PowerSeries::new(C64::default(), alloc::vec![C64::default(), c64(1.0, 0.0)]).unwrap())
    }

    pub fn constant(c: C64) -> Self {
        Self::Polynomial(PowerSeries::new(C64::default(), alloc::vec![c]).unwrap())
    }

    /// `w - p`.
    pub fn shift(p: C64) -> Self {
        Self::Polynomial(PowerSeries::new(C64::default(), alloc::vec![-p, c64(1.0, 0.0)]).unwrap())
    }

    /// Polynomial `sum c_j w^j`.
    pub fn polynomial(coeffs: &[C64]) -> Self {
        let coeffs = if coeffs.is_empty() { alloc::vec![C64::default()] } else { coeffs.to_vec() };
        Self::Polynomial(PowerSeries::new(C64::default(), coeffs).unwrap())
    }

    /// `a Log(b w)` whose cut points away from `b w_ref`.
    pub fn log_avoiding(a: C64, b: C64, w_ref: C64) -> Self {
        let p = b * w_ref;
        Self::Log { a, b, cut: atan2(p.im, p.re) + PI }
    }

    fn log_branch(b: C64, cut: f64, w: C64) -> Result<C64> {
        let p = b * w;
        let r = hypot(p.re, p.im);
        if r == 0.0 {
            return Err(Error::Undefined(w));
        }
        let mut theta = atan2(p.im, p.re);
        let lo = cut - 2.0 * PI;
        while theta <= lo {
            theta += 2.0 * PI;
        }
        while theta > cut {
            theta -= 2.0 * PI;
        }
        if (cut - theta) < CUT_TOL || (theta - lo) < CUT_TOL {
            return Err(Error::OnBranchCut(w));
        }
        Ok(c64(log(r), theta))
    }

    pub fn eval(&self, w: C64) -> Result<C64> {
        let v = match self {
            Self::Exp { a, b, c } => a * (b * w).exp() + c,
            Self::Log { a, b, cut } => a * Self::log_branch(*b, *cut, w)?,
            Self::Polynomial(p) => p.eval(w),
            Self::LaurentPoly(l) => {
                if l.min_index() < 0 && w == l.center {
                    return Err(Error::Undefined(w));
                }
                l.eval(w)
            }
            Self::Series { series, radius } => {
                if cabs(w - series.center) >= *radius {
                    return Err(Error::OutsideRadius(w));
                }
                series.eval(w)
            }
        };
        finite(v, w)
    }

    pub fn derivative(&self, w: C64) -> Result<C64> {
        let v = match self {
            Self::Exp { a, b, .. } => a * b * (b * w).exp(),
            Self::Log { a, b, cut } => {
                Self::log_branch(*b, *cut, w)?;
                a / w
            }
            Self::Polynomial(p) => p.differentiate().eval(w),
            Self::LaurentPoly(l) => {
                if l.min_index() < 0 && w == l.center {
                    return Err(Error::Undefined(w));
                }
                l.differentiate().eval(w)
            }
            Self::Series { series, radius } => {
                if cabs(w - series.center) >= *radius {
                    return Err(Error::OutsideRadius(w));
                }
                series.differentiate().eval(w)
            }
        };
        finite(v, w)
    }
}

fn finite(v: C64, at: C64) -> Result<C64> {
    if grid::is_finite(&v) {
        Ok(v)
    } else {
        Err(Error::Undefined(at))
    }
}

/// Which construction produced a [`SolutionHandle`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Nonvanishing,
    SimpleZero,
    Multiplicity,
    ImplicitChecked,
}

/// Named inputs a solution was built from.
#[derive(Debug, Clone, PartialEq)]
pub enum Ingredient {
    Map(AnalyticMap),
    Series(PowerSeries),
    Scalar(C64),
    Real(f64),
}

/// A solution `z -> u(z)` of a separable equation with its provenance.
///
/// `eval` fails outside the certified domain (failed inversion, radius
/// guard, singularities); grid sampling masks those nodes.
#[derive(Clone)]
pub struct SolutionHandle {
    eval: Arc<dyn Fn(C64) -> Result<C64> + Send + Sync>,
    pub family: Family,
    pub z0: C64,
    pub w0: C64,
    pub ingredients: Vec<(String, Ingredient)>,
}

impl core::fmt::Debug for SolutionHandle {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("SolutionHandle")
            .field("family", &self.family)
            .field("z0", &self.z0)
            .field("w0", &self.w0)
            .field("ingredients", &self.ingredients)
            .finish_non_exhaustive()
    }
}

impl SolutionHandle {
    pub fn new(
        family: Family,
        z0: C64,
        w0: C64,
        eval: impl Fn(C64) -> Result<C64> + Send + Sync + 'static,
    ) -> Self {
        Self { eval: Arc::new(eval), family, z0, w0, ingredients: Vec::new() }
    }

    fn with(mut self, name: &str, what: Ingredient) -> Self {
        self.ingredients.push((name.into(), what));
        self
    }

    pub fn eval(&self, z: C64) -> Result<C64> {
        (self.eval)(z)
    }

    pub fn in_domain(&self, z: C64) -> bool {
        self.eval(z).is_ok()
    }

    /// Samples the solution, masking nodes outside its domain.
    pub fn sample(&self, geom: GridGeometry) -> Result<GridFunction> {
        GridFunction::sample_partial(geom, |z| self.eval(z).ok())
    }
}

/// Limits for the continuation used to invert `F`.
const NEWTON_MAX_ITER: usize = 60;
const MIN_PATH_STEP: f64 = 1e-7;

fn newton(map: &AnalyticMap, mut w: C64, target: C64, d_min: f64) -> Option<(C64, C64)> {
    let tol = 1e-14 * (1.0 + cabs(target));
    for _ in 0..NEWTON_MAX_ITER {
        let r = map.eval(w).ok()? - target;
        let d = map.derivative(w).ok()?;
        if !(cabs(d) >= d_min) {
            return None;
        }
        if cabs(r) <= tol {
            return Some((w, d));
        }
        let step = r / d;
        let mut lambda = 1.0;
        loop {
            let trial = w - step * lambda;
            match map.eval(trial) {
                Ok(v) if cabs(v - target) < cabs(r) => {
                    w = trial;
                    break;
                }
                _ if lambda < 1.0 / 1024.0 => return None,
                _ => lambda *= 0.5,
            }
        }
        if cabs(step) * lambda <= 4.0 * f64::EPSILON * (1.0 + cabs(w)) {
            let d = map.derivative(w).ok()?;
            return (cabs(d) >= d_min).then_some((w, d));
        }
    }
    None
}

/// Solves `F(w) = zeta` by continuation along the segment from `F(w0)` to
/// `zeta`, starting at `w0`.
///
/// Each accepted point becomes the next anchor; Newton iterates must keep
/// `|F'|` at least half its value at the current anchor. The path step is
/// halved on failure, and [`Error::InversionFailed`] is returned when it
/// falls below `1e-7` of the whole segment.
pub fn local_inverse(map: &AnalyticMap, w0: C64, zeta: C64) -> Result<C64> {
    let start = map.eval(w0)?;
    let total = zeta - start;
    let (mut anchor_z, mut anchor_w) = (start, w0);
    let mut anchor_d = map.derivative(w0)?;
    if anchor_d == C64::default() {
        return Err(Error::InversionFailed(zeta));
    }
    let (mut t, mut dt) = (0.0f64, 1.0f64);
    while t < 1.0 {
        let t_new = (t + dt).min(1.0);
        let target = if t_new >= 1.0 { zeta } else { start + total * t_new };
        let guess = anchor_w + (target - anchor_z) / anchor_d;
        match newton(map, guess, target, 0.5 * cabs(anchor_d)) {
            Some((w, d)) => {
                anchor_z = target;
                anchor_w = w;
                anchor_d = d;
                t = t_new;
                dt = (2.0 * dt).min(1.0);
            }
            None => {
                dt *= 0.5;
                if dt < MIN_PATH_STEP {
                    return Err(Error::InversionFailed(zeta));
                }
            }
        }
    }
    Ok(anchor_w)
}

/// `v(z) = H(G(z) - G(z0) + C(z) + F(w0))` with `H` the local inverse of
/// `F` through `w0`.
pub fn solve_nonvanishing(big_f: AnalyticMap, big_g: ZFn, z0: C64, w0: C64, c: AnalyticMap) -> Result<SolutionHandle> {
    let c0 = c.eval(z0)?;
    if cabs(c0) > 1e-12 {
        return Err(Error::Precondition("C(z0) must vanish"));
    }
    let f_w0 = big_f.eval(w0)?;
    if big_f.derivative(w0)? == C64::default() {
        return Err(Error::InversionFailed(f_w0));
    }
    let g0 = big_g(z0);
    let (fm, cm, gm) = (big_f.clone(), c.clone(), big_g.clone());
    let eval = move |z: C64| -> Result<C64> {
        let zeta = gm(z) - g0 + cm.eval(z)? + f_w0;
        if !grid::is_finite(&zeta) {
            return Err(Error::Undefined(z));
        }
        local_inverse(&fm, w0, zeta)
    };
    Ok(SolutionHandle::new(Family::Nonvanishing, z0, w0, eval)
        .with("F", Ingredient::Map(big_f))
        .with("C", Ingredient::Map(c)))
}

/// Relative size the trailing terms of `h` may have at an accepted point.
pub const RADIUS_GUARD: f64 = 1e-8;

/// Evaluates the truncated `h` at `zeta`, failing where its trailing terms
/// (the last quarter of the coefficients, at least two) are not below
/// [`RADIUS_GUARD`] times the partial sum.
pub fn eval_guarded(h: &PowerSeries, zeta: C64) -> Result<C64> {
    let n = h.order();
    let tail = ((n + 1) / 4).max(2).min(n + 1);
    let mut sum = C64::default();
    let mut power = c64(1.0, 0.0);
    let mut tail_max = 0.0f64;
    for j in 0..=n {
        let term = h.coeff(j) * power;
        sum += term;
        if j + tail > n {
            tail_max = tail_max.max(cabs(term));
        }
        power *= zeta;
    }
    if !(tail_max <= RADIUS_GUARD * cabs(sum)) {
        return Err(Error::OutsideRadius(zeta));
    }
    finite(sum, zeta)
}

/// `v(z) = h(B(z) exp(f_1 G(z)))` for `f` with a simple zero at its center.
pub fn solve_simple_zero(
    f: &PowerSeries,
    big_g: ZFn,
    z0: C64,
    w0: C64,
    b: AnalyticMap,
    order: usize,
) -> Result<SolutionHandle> {
    if f.center != w0 {
        return Err(Error::CenterMismatch(f.center, w0));
    }
    let h = normal_form_h(f, order)?;
    if cabs(b.eval(z0)?) > 1e-12 {
        return Err(Error::Precondition("B(z0) must vanish"));
    }
    let f1 = f.coeff(1);
    let (hm, bm) = (h.clone(), b.clone());
    let eval = move |z: C64| -> Result<C64> {
        let zeta = bm.eval(z)? * (big_g(z) * f1).exp();
        if !grid::is_finite(&zeta) {
            return Err(Error::Undefined(z));
        }
        eval_guarded(&hm, zeta)
    };
    Ok(SolutionHandle::new(Family::SimpleZero, z0, w0, eval)
        .with("f", Ingredient::Series(f.clone()))
        .with("h", Ingredient::Series(h))
        .with("B", Ingredient::Map(b)))
}

/// `(2/(1+alpha)) zbar |z|^(alpha-1)`, continuous with value 0 at the origin.
pub fn power_antiderivative(alpha: f64, z: C64) -> C64 {
    let r = cabs(z);
    if r == 0.0 {
        return C64::default();
    }
    z.conj() * (2.0 / (1.0 + alpha) * libm::pow(r, alpha - 1.0))
}

/// `u = -(z-z0)^m / (phi(z) + (z-z0)^m (2/(1+alpha)) zbar |z|^(alpha-1))`,
/// a solution of `u_zbar = u^2 |z|^(alpha-1)` vanishing to order `m` at
/// `z0`. Zeros of the denominator are outside the domain.
pub fn solve_multiplicity_example(alpha: f64, m: u32, phi: AnalyticMap, z0: C64) -> Result<SolutionHandle> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Domain("alpha must lie in (0, 1]"));
    }
    if m == 0 {
        return Err(Error::Domain("m must be at least 1"));
    }
    if phi.eval(z0)? == C64::default() {
        return Err(Error::Precondition("phi(z0) must be nonzero"));
    }
    let pm = phi.clone();
    let eval = move |z: C64| -> Result<C64> {
        let p = (z - z0).powi(m as i32);
        let den = pm.eval(z)? + p * power_antiderivative(alpha, z);
        if den == C64::default() {
            return Err(Error::Undefined(z));
        }
        finite(-p / den, z)
    };
    Ok(SolutionHandle::new(Family::Multiplicity, z0, C64::default(), eval)
        .with("phi", Ingredient::Map(phi))
        .with("alpha", Ingredient::Real(alpha))
        .with("m", Ingredient::Real(m as f64)))
}

/// Right-hand side `u^2 |z|^(alpha-1)` of the equation solved by
/// [`solve_multiplicity_example`]; undefined at the origin when `alpha < 1`.
pub fn multiplicity_rhs(alpha: f64, z: C64, u: C64) -> Option<C64> {
    let r = cabs(z);
    if alpha < 1.0 && r == 0.0 {
        return None;
    }
    Some(u * u * libm::pow(r, alpha - 1.0))
}

/// Outcome of [`verify_implicit_formula`].
#[derive(Debug, Clone, PartialEq)]
pub struct ImplicitCheck {
    /// `phi = (z-z0)^M (F(u) - G)` for the selected `M`.
    pub phi: GridFunction,
    /// Holomorphy residual `dbar(phi)`.
    pub report: ResidualReport,
    pub m: u32,
    /// Every admissible exponent in the scanned range.
    pub candidates: Vec<u32>,
    /// `phi(z0)` estimated from the four neighbours of `z0`.
    pub phi_at_z0: C64,
}

/// Exponents scanned when none is supplied.
pub const M_SCAN: core::ops::RangeInclusive<u32> = 1..=8;
/// `|phi(z0)|` must exceed this multiple of the median `|phi|`.
pub const PHI_FLOOR: f64 = 1e-6;
/// Largest accepted `|log2(|phi| at 2h / |phi| at h)|` around `z0`.
pub const LOCAL_EXPONENT_TOL: f64 = 0.5;

struct Candidate {
    phi: GridFunction,
    at_z0: C64,
    admissible: bool,
}

/// Mean of `|g|` over the four axis neighbours at distance `d` nodes.
fn ring_mean(g: &GridFunction, i: usize, j: usize, d: usize) -> Option<f64> {
    let geom = g.geometry();
    if i < d || j < d || i + d >= geom.nx || j + d >= geom.ny {
        return None;
    }
    let idx = [geom.index(i - d, j), geom.index(i + d, j), geom.index(i, j - d), geom.index(i, j + d)];
    let mut sum = 0.0;
    for k in idx {
        sum += cabs(g.get(k)?);
    }
    Some(sum / 4.0)
}

fn neighbour_average(g: &GridFunction, i: usize, j: usize) -> Option<C64> {
    let geom = g.geometry();
    if i == 0 || j == 0 || i + 1 >= geom.nx || j + 1 >= geom.ny {
        return None;
    }
    let idx = [geom.index(i - 1, j), geom.index(i + 1, j), geom.index(i, j - 1), geom.index(i, j + 1)];
    let mut s = C64::default();
    for k in idx {
        s += g.get(k)?;
    }
    Some(s * 0.25)
}

fn median(mut xs: Vec<f64>) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.sort_by(|a, b| a.total_cmp(b));
    xs[xs.len() / 2]
}

/// Recovers `phi = (z-z0)^M (F(u) - G)` from grid samples of `u`.
///
/// `z0` must be a node with unmasked neighbours at distance `h` and `2h`.
/// When `m` is `None`, `M` runs over [`M_SCAN`]; an exponent is admissible
/// when the neighbour average of `phi` at `z0` exceeds [`PHI_FLOOR`] times
/// the median `|phi|` and `|phi|` neither grows nor decays like a power of
/// `|z - z0|` there. The smallest admissible exponent is selected.
pub fn verify_implicit_formula(
    u: &GridFunction,
    big_f: &AnalyticMap,
    big_g: impl Fn(C64) -> C64,
    z0: C64,
    m: Option<u32>,
) -> Result<ImplicitCheck> {
    let geom = *u.geometry();
    let (i0, j0) = geom.nearest(z0).ok_or(Error::Precondition("z0 must lie on the grid"))?;
    if cabs(geom.point(i0, j0) - z0) > 1e-9 * geom.spacing {
        return Err(Error::Precondition("z0 must be a grid node"));
    }
    let reference = u.iter_unmasked().next().map(|(_, v)| v).ok_or(Error::NoInteriorPoints)?;
    if u.iter_unmasked().all(|(_, v)| cabs(v - reference) <= 1e-14 * (1.0 + cabs(reference))) {
        return Err(Error::Precondition("u is constant"));
    }

    let base = u.map(|z, v| {
        let fu = big_f.eval(v).ok()?;
        Some(fu - big_g(z))
    });
    let scan: Vec<u32> = match m {
        Some(m) => alloc::vec![m],
        None => M_SCAN.collect(),
    };
    let mut candidates = Vec::new();
    for &mm in &scan {
        let phi = base.map(|z, d| {
            if z == z0 {
                return None;
            }
            Some((z - z0).powi(mm as i32) * d)
        });
        let Some(at_z0) = neighbour_average(&phi, i0, j0) else {
            return Err(Error::Precondition("neighbours of z0 must be unmasked"));
        };
        let ring1 = ring_mean(&phi, i0, j0, 1).ok_or(Error::Precondition("neighbours of z0 must be unmasked"))?;
        let ring2 = ring_mean(&phi, i0, j0, 2).ok_or(Error::Precondition("neighbours of z0 must be unmasked"))?;
        let med = median(phi.iter_unmasked().map(|(_, v)| cabs(v)).collect());
        let exponent = log(ring2 / ring1) / core::f64::consts::LN_2;
        let admissible = cabs(at_z0) >= PHI_FLOOR * med && exponent.abs() < LOCAL_EXPONENT_TOL;
        candidates.push((mm, Candidate { phi, at_z0, admissible }));
    }
    let admissible: Vec<u32> = candidates.iter().filter(|(_, c)| c.admissible).map(|(m, _)| *m).collect();
    let &chosen = admissible.first().ok_or(Error::NoAdmissibleExponent)?;
    let (_, cand) = candidates.into_iter().find(|(m, _)| *m == chosen).unwrap();
    let report = grid::cr_residual(&cand.phi, |_, _| Some(C64::default()))?;
    Ok(ImplicitCheck { phi: cand.phi, report, m: chosen, candidates: admissible, phi_at_z0: cand.at_z0 })
}

/// Holomorphy residual of `F(v) - F(u)` for two solutions of the same
/// separable equation.
pub fn holomorphic_difference_check(u: &GridFunction, v: &GridFunction, big_f: &AnalyticMap) -> Result<ResidualReport> {
    let image = |g: &GridFunction| -> Result<GridFunction> {
        for (z, val) in g.iter_unmasked() {
            big_f.eval(val).map_err(|_| Error::Undefined(z))?;
        }
        Ok(g.map(|_, val| big_f.eval(val).ok()))
    };
    let diff = image(v)?.zip_with(&image(u)?, |a, b| a - b)?;
    grid::cr_residual(&diff, |_, _| Some(C64::default()))
}

/// Residual of `dbar(G) - g` on `geom`, for checking a claimed
/// zbar-antiderivative.
pub fn antiderivative_check(
    geom: GridGeometry,
    big_g: impl Fn(C64) -> C64,
    g: impl Fn(C64) -> Option<C64>,
) -> Result<ResidualReport> {
    let sampled = GridFunction::sample(geom, big_g)?;
    grid::cr_residual(&sampled, |z, _| g(z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::cr_residual;
    use crate::series::PowerSeries;

    fn zbar() -> ZFn {
        Arc::new(|z: C64| z.conj())
    }

    fn fd_check(map: &AnalyticMap, w: C64) {
        let e = 1e-5;
        let fd = (map.eval(w + e).unwrap() - map.eval(w - e).unwrap()) / (2.0 * e);
        let exact = map.derivative(w).unwrap();
        assert!(cabs(fd - exact) < 1e-8 * (1.0 + cabs(exact)), "{map:?} at {w}");
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let w = c64(0.3, -0.2);
        fd_check(&AnalyticMap::Exp { a: c64(-1.0, 0.0), b: c64(-1.0, 0.0), c: c64(0.0, 0.0) }, w);
        fd_check(&AnalyticMap::log_avoiding(c64(-1.0, 0.0), c64(-1.0, 0.0), c64(-1.0, 0.0)), c64(-0.7, 0.1));
        fd_check(&AnalyticMap::polynomial(&[c64(1.0, 0.0), c64(0.0, 2.0), c64(-0.5, 0.5)]), w);
        fd_check(&AnalyticMap::LaurentPoly(LaurentSeries::new(C64::default(), -1, alloc::vec![c64(-1.0, 0.0)])), w);
    }

    #[test]
    fn log_branch_cut() {
        let l = AnalyticMap::Log { a: c64(1.0, 0.0), b: c64(1.0, 0.0), cut: PI };
        assert!(matches!(l.eval(c64(-2.0, 0.0)), Err(Error::OnBranchCut(_))));
        assert!(cabs(l.eval(c64(0.0, 1.0)).unwrap() - c64(0.0, PI / 2.0)) < 1e-15);
        let l = AnalyticMap::Log { a: c64(1.0, 0.0), b: c64(1.0, 0.0), cut: 0.0 };
        assert!(cabs(l.eval(c64(-1.0, 0.0)).unwrap() - c64(0.0, -PI)) < 1e-15);
        assert!(matches!(l.eval(c64(3.0, 0.0)), Err(Error::OnBranchCut(_))));
    }

    #[test]
    fn local_inverse_of_exponential() {
        let f = AnalyticMap::Exp { a: c64(-1.0, 0.0), b: c64(-1.0, 0.0), c: C64::default() };
        for x in [-0.8, -0.2, 0.1, 0.3, 0.45] {
            let zeta = c64(2.0 * x - 1.0, 0.0);
            let w = local_inverse(&f, C64::default(), zeta).unwrap();
            assert!(cabs(w - c64(-log(1.0 - 2.0 * x), 0.0)) < 1e-12, "{x}");
        }
        assert!(matches!(local_inverse(&f, C64::default(), C64::default()), Err(Error::InversionFailed(_))));
    }

    #[test]
    fn exponential_example_closed_form() {
        let f = AnalyticMap::Exp { a: c64(-1.0, 0.0), b: c64(-1.0, 0.0), c: C64::default() };
        let sol = solve_nonvanishing(f, zbar(), C64::default(), C64::default(), AnalyticMap::identity()).unwrap();
        assert_eq!(sol.eval(C64::default()).unwrap(), C64::default());
        for z in [c64(0.2, 0.7), c64(-0.5, -0.3), c64(0.39, 0.0)] {
            let v = sol.eval(z).unwrap();
            assert!(cabs(v - c64(-log(1.0 - 2.0 * z.re), 0.0)) < 1e-12);
        }
        let res = |h: f64| {
            let geom = GridGeometry::covering(c64(-0.3, -0.3), c64(0.3, 0.3), h).unwrap();
            cr_residual(&sol.sample(geom).unwrap(), |_, u| Some(u.exp())).unwrap().max_abs
        };
        let (coarse, fine) = (res(0.02), res(0.01));
        assert!(coarse / fine > 3.0, "{coarse} {fine}");
        let geom = GridGeometry::covering(c64(-0.3, -0.3), c64(0.3, 0.3), 0.01).unwrap();
        let v = sol.sample(geom).unwrap();
        // real-valued solution: the level set through z0 is a whole column
        let (i0, _) = geom.nearest(C64::default()).unwrap();
        let level = v.level_set(C64::default(), 1e-12);
        assert_eq!(level.len(), geom.ny);
        assert!(level.iter().all(|&(i, _)| i == i0));
        assert!(!grid::is_isolated(&level));
    }

    #[test]
    fn trivial_nonvanishing_cases() {
        let w0 = c64(0.5, 0.25);
        let sol =
            solve_nonvanishing(AnalyticMap::identity(), Arc::new(|_| C64::default()), c64(1.0, 0.0), w0, AnalyticMap::constant(C64::default()))
                .unwrap();
        assert_eq!(sol.eval(c64(3.0, -2.0)).unwrap(), w0);
        let z0 = c64(0.1, 0.2);
        let sol = solve_nonvanishing(AnalyticMap::identity(), zbar(), z0, w0, AnalyticMap::constant(C64::default())).unwrap();
        let z = c64(-0.4, 0.9);
        assert!(cabs(sol.eval(z).unwrap() - (z.conj() - z0.conj() + w0)) < 1e-15);
    }

    #[test]
    fn simple_zero_linear_and_trivial() {
        let f = PowerSeries::new(C64::default(), alloc::vec![C64::default(), c64(1.0, 0.0), C64::default()]).unwrap();
        let g: ZFn = Arc::new(|z: C64| z.conj() * z.conj());
        let sol = solve_simple_zero(&f, g, C64::default(), C64::default(), AnalyticMap::identity(), 8).unwrap();
        let z = c64(0.3, 0.4);
        assert!(cabs(sol.eval(z).unwrap() - z * (z.conj() * z.conj()).exp()) < 1e-14);
        let sol = solve_simple_zero(&f, zbar(), C64::default(), C64::default(), AnalyticMap::constant(C64::default()), 8).unwrap();
        assert_eq!(sol.eval(z).unwrap(), C64::default());
    }

    #[test]
    fn simple_zero_quadratic_matches_closed_form() {
        let mut c = alloc::vec![C64::default(); 33];
        c[1] = c64(1.0, 0.0);
        c[2] = c64(1.0, 0.0);
        let f = PowerSeries::new(C64::default(), c).unwrap();
        let sol = solve_simple_zero(&f, zbar(), C64::default(), C64::default(), AnalyticMap::identity(), 32).unwrap();
        let z = c64(0.1, -0.05);
        let zeta = z * z.conj().exp();
        assert!(cabs(sol.eval(z).unwrap() - zeta / (1.0 - zeta)) < 1e-12);
        assert!(matches!(sol.eval(c64(0.6, 0.0)), Err(Error::OutsideRadius(_))));
    }

    #[test]
    fn autonomous_quadratic_example() {
        let sol = solve_multiplicity_example(1.0, 1, AnalyticMap::constant(c64(1.0, 0.0)), c64(1.0, 0.0)).unwrap();
        let z = c64(0.7, 0.4);
        let exact = -(z - 1.0) / (1.0 + (z - 1.0) * z.conj());
        assert!(cabs(sol.eval(z).unwrap() - exact) < 1e-15);
        assert_eq!(sol.eval(c64(1.0, 0.0)).unwrap(), C64::default());
        assert!(matches!(
            solve_multiplicity_example(0.5, 1, AnalyticMap::shift(c64(1.0, 0.0)), c64(1.0, 0.0)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn implicit_round_trip() {
        let alpha = 0.5;
        let sol = solve_multiplicity_example(alpha, 1, AnalyticMap::constant(c64(1.0, 0.0)), C64::default()).unwrap();
        let geom = GridGeometry::centered(C64::default(), 0.2, 0.01).unwrap();
        let u = sol.sample(geom).unwrap();
        let f = AnalyticMap::LaurentPoly(LaurentSeries::new(C64::default(), -1, alloc::vec![c64(-1.0, 0.0)]));
        let chk = verify_implicit_formula(&u, &f, |z| power_antiderivative(alpha, z), C64::default(), None).unwrap();
        assert_eq!(chk.m, 1);
        assert!(cabs(chk.phi_at_z0 - c64(1.0, 0.0)) < 1e-10);
        assert!(chk.phi.iter_unmasked().all(|(_, v)| cabs(v - c64(1.0, 0.0)) < 1e-10));

        let flat = GridFunction::sample(geom, |_| c64(0.0, 0.0)).unwrap();
        assert!(matches!(verify_implicit_formula(&flat, &f, |_| C64::default(), C64::default(), None), Err(Error::Precondition(_))));
    }

    #[test]
    fn difference_of_two_exponential_solutions() {
        let f = AnalyticMap::Exp { a: c64(-1.0, 0.0), b: c64(-1.0, 0.0), c: C64::default() };
        let s1 = solve_nonvanishing(f.clone(), zbar(), C64::default(), C64::default(), AnalyticMap::identity()).unwrap();
        let s2 = solve_nonvanishing(f.clone(), zbar(), C64::default(), C64::default(), AnalyticMap::polynomial(&[C64::default(), c64(2.0, 0.0)]))
            .unwrap();
        let geom = GridGeometry::covering(c64(-0.2, -0.2), c64(0.1, 0.2), 0.01).unwrap();
        let (u, v) = (s1.sample(geom).unwrap(), s2.sample(geom).unwrap());
        assert!(holomorphic_difference_check(&u, &v, &f).unwrap().max_abs < 1e-10);
        assert_eq!(holomorphic_difference_check(&u, &u, &f).unwrap().max_abs, 0.0);
    }

    #[test]
    fn antiderivative_of_power_weight() {
        let res = |h: f64| {
            let geom = GridGeometry::covering(c64(0.2, 0.2), c64(0.6, 0.6), h).unwrap();
            antiderivative_check(geom, |z| power_antiderivative(0.5, z), |z| Some(c64(libm::pow(cabs(z), -0.5), 0.0)))
                .unwrap()
                .max_abs
        };
        let (coarse, fine) = (res(0.01), res(0.005));
        assert!(coarse / fine > 3.5 && fine < 1e-3, "{coarse} {fine}");
    }
}
