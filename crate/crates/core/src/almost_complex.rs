//! Almost complex structures on `R^4 = C^2` in normal coordinates `(ζ, w)`
//! and J-holomorphic curves `z -> (h(z), k(z))`.
//!
//! A structure is described either by four real entries `(a1, a2, b1, b2)`
//! of its matrix or by the complex coefficients `(β1, β2)` of its `-i`
//! eigenspace. Real vectors are ordered `(Re ζ, Im ζ, Re w, Im w)`.

use alloc::sync::Arc;

use nalgebra::{Matrix2, Matrix4, Vector4};

use crate::counterexample::{big_v, CounterexampleParams};
use crate::grid::{GridFunction, GridGeometry, ResidualReport};
use crate::math::{cabs, hypot};
use crate::separable::AnalyticMap;
use crate::{c64, Error, Result, C64};

pub type RealMatrix = Matrix4<f64>;
pub type ComplexMatrix = Matrix4<C64>;

/// `|β1|` this close to one is treated as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-14;

const I: C64 = C64::new(0.0, 1.0);

/// Real parameters of the structure matrix.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AbParams {
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
}

/// Rotation by a quarter turn, the standard structure on `R^2`.
pub fn j_std() -> Matrix2<f64> {
    Matrix2::new(0.0, -1.0, 1.0, 0.0)
}

/// Block-diagonal standard structure on `R^4`.
pub fn j0() -> RealMatrix {
    RealMatrix::new(
        0.0, -1.0, 0.0, 0.0, //
        1.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, -1.0, //
        0.0, 0.0, 1.0, 0.0,
    )
}

/// Structure matrix from its real parameters. Needs `b2 < 1`.
pub fn j_matrix_from_ab(p: AbParams) -> Result<RealMatrix> {
    let AbParams { a1, a2, b1, b2 } = p;
    if !(b2 < 1.0) || !(a1.is_finite() && a2.is_finite() && b1.is_finite()) {
        return Err(Error::Domain("structure parameters need b2 < 1"));
    }
    Ok(RealMatrix::new(
        0.0,
        -1.0,
        a1,
        a2,
        1.0,
        0.0,
        (a1 * b1 * b2 - a2 * b1 * b1 - a1 * b1 - a2) / (b2 - 1.0),
        a1 * b2 - a2 * b1 - a1,
        0.0,
        0.0,
        b1,
        -1.0 + b2,
        0.0,
        0.0,
        1.0 + (b1 * b1 + b2) / (1.0 - b2),
        -b1,
    ))
}

fn check_beta1(beta1: C64) -> Result<f64> {
    let n = beta1.norm_sqr();
    if !(n.is_finite()) || !(cabs(beta1) < 1.0 - DEGENERACY_TOL) {
        return Err(Error::Domain("structure coefficients need |beta1| < 1"));
    }
    Ok(n)
}

/// Structure matrix written in terms of `(β1, β2)`. Needs `|β1| < 1`.
pub fn j_matrix_from_beta(beta1: C64, beta2: C64) -> Result<RealMatrix> {
    let m = check_beta1(beta1)? - 1.0;
    let (r1, i1, r2, i2) = (beta1.re, beta1.im, beta2.re, beta2.im);
    let n = beta1.norm_sqr();
    Ok(RealMatrix::new(
        0.0,
        -1.0,
        2.0 * (i2 * r1 - i1 * r2 - i2) / m,
        2.0 * (i2 * i1 + r2 * r1 + r2) / m,
        1.0,
        0.0,
        -2.0 * (i2 * i1 + r2 * r1 - r2) / m,
        2.0 * (i2 * r1 - i1 * r2 + i2) / m,
        0.0,
        0.0,
        -2.0 * i1 / m,
        -1.0 + 2.0 * (n + r1) / m,
        0.0,
        0.0,
        1.0 - 2.0 * (n - r1) / m,
        2.0 * i1 / m,
    ))
}

/// `(β1, β2)` from `(a1, a2, b1, b2)`. `b2 < 1` is equivalent to `|β1| < 1`.
pub fn beta_from_ab(p: AbParams) -> Result<(C64, C64)> {
    let AbParams { a1, a2, b1, b2 } = p;
    if !(b2 < 1.0) {
        return Err(Error::Domain("structure parameters need b2 < 1"));
    }
    let den = c64(b2 - 2.0, b1);
    let beta1 = c64(b2, -b1) / den;
    let beta2 = c64(a2, a1 * b2 - a2 * b1 - a1) / den;
    Ok((beta1, beta2))
}

/// Inverse of [`beta_from_ab`]. Needs `|β1| < 1`.
pub fn ab_from_beta(beta1: C64, beta2: C64) -> Result<AbParams> {
    let den = check_beta1(beta1)? - 1.0;
    let a = I * 2.0 * (beta1 * beta2.conj() + beta2) / den;
    let b = I * 2.0 * beta1 * (beta1.conj() + 1.0) / den;
    Ok(AbParams { a1: a.re, a2: a.im, b1: b.re, b2: b.im })
}

/// Eigenvector matrix `P`, its closed-form inverse and `D = diag(-i, i, -i, i)`,
/// so that `J = P D P^-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenframe {
    pub p: ComplexMatrix,
    pub p_inv: ComplexMatrix,
    pub d: ComplexMatrix,
}

impl Eigenframe {
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.p * self.d * self.p_inv
    }
}

pub fn eigenframe(beta1: C64, beta2: C64) -> Result<Eigenframe> {
    let n = beta1.norm_sqr();
    if !n.is_finite() || (cabs(beta1) - 1.0).abs() <= DEGENERACY_TOL || !beta2.is_finite() {
        return Err(Error::Domain("eigenframe degenerates at |beta1| = 1"));
    }
    let (b1, b2) = (beta1, beta2);
    let (c1, c2) = (b1.conj(), b2.conj());
    let zero = C64::default();
    let one = c64(1.0, 0.0);
    let p = ComplexMatrix::new(
        one,
        one,
        b2,
        c2,
        I,
        -I,
        -I * b2,
        I * c2,
        zero,
        zero,
        one + b1,
        one + c1,
        zero,
        zero,
        I - I * b1,
        -I + I * c1,
    );
    let m = c64(n - 1.0, 0.0);
    let p_inv = ComplexMatrix::new(
        one,
        -I,
        c2 * (one - b1) / m,
        I * c2 * (one + b1) / m,
        one,
        I,
        b2 * (one - c1) / m,
        -I * b2 * (one + c1) / m,
        zero,
        zero,
        (c1 - one) / m,
        I * (one + c1) / m,
        zero,
        zero,
        (b1 - one) / m,
        -I * (one + b1) / m,
    ) * c64(0.5, 0.0);
    let d = ComplexMatrix::from_diagonal(&Vector4::new(-I, I, -I, I));
    Ok(Eigenframe { p, p_inv, d })
}

/// The matrix relating `(h_zbar, k_zbar)` to `conj(h_z, k_z)` along a
/// J-holomorphic curve: first column zero, second column `(β2, β1)`.
pub fn q_matrix(beta1: C64, beta2: C64) -> Matrix2<C64> {
    Matrix2::new(C64::default(), beta2, C64::default(), beta1)
}

/// `(ζ, w)` to `(Re ζ, Im ζ, Re w, Im w)`.
pub fn to_real(zeta: C64, w: C64) -> Vector4<f64> {
    Vector4::new(zeta.re, zeta.im, w.re, w.im)
}

/// Inverse of [`to_real`].
pub fn to_complex(v: &Vector4<f64>) -> (C64, C64) {
    (c64(v[0], v[1]), c64(v[2], v[3]))
}

/// Smoothness class of the coefficients; continuous structures only support
/// first-order convergence claims.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regularity {
    Smooth,
    Continuous,
}

impl Regularity {
    /// Convergence order expected from finite-difference residuals.
    pub fn expected_order(self) -> u32 {
        match self {
            Regularity::Smooth => 2,
            Regularity::Continuous => 1,
        }
    }
}

pub type CoefficientFn = Arc<dyn Fn(C64, C64) -> C64 + Send + Sync>;
pub type AbFn = Arc<dyn Fn(C64, C64) -> AbParams + Send + Sync>;

/// An almost complex structure given pointwise by its coefficients.
#[derive(Clone)]
pub struct AlmostComplexStructure {
    beta1: CoefficientFn,
    beta2: CoefficientFn,
    ab: Option<AbFn>,
    pub regularity: Regularity,
    fibered: bool,
}

impl core::fmt::Debug for AlmostComplexStructure {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("AlmostComplexStructure")
            .field("regularity", &self.regularity)
            .field("fibered", &self.fibered)
            .field("ab_form", &self.ab.is_some())
            .finish()
    }
}

impl AlmostComplexStructure {
    pub fn from_beta(
        beta1: impl Fn(C64, C64) -> C64 + Send + Sync + 'static,
        beta2: impl Fn(C64, C64) -> C64 + Send + Sync + 'static,
        regularity: Regularity,
    ) -> Self {
        Self { beta1: Arc::new(beta1), beta2: Arc::new(beta2), ab: None, regularity, fibered: false }
    }

    /// Structure from the real parameters; `β` is derived on demand.
    pub fn from_ab(ab: impl Fn(C64, C64) -> AbParams + Send + Sync + 'static, regularity: Regularity) -> Self {
        let ab: AbFn = Arc::new(ab);
        let (f1, f2) = (ab.clone(), ab.clone());
        let nan = c64(f64::NAN, f64::NAN);
        Self {
            beta1: Arc::new(move |z, w| beta_from_ab(f1(z, w)).map(|b| b.0).unwrap_or(nan)),
            beta2: Arc::new(move |z, w| beta_from_ab(f2(z, w)).map(|b| b.1).unwrap_or(nan)),
            ab: Some(ab),
            regularity,
            fibered: false,
        }
    }

    pub fn is_fibered(&self) -> bool {
        self.fibered
    }

    pub fn has_ab_form(&self) -> bool {
        self.ab.is_some()
    }

    /// `(β1, β2)` at a point, failing where `|β1| < 1` does not hold.
    pub fn betas(&self, zeta: C64, w: C64) -> Result<(C64, C64)> {
        let b1 = (self.beta1)(zeta, w);
        let b2 = (self.beta2)(zeta, w);
        check_beta1(b1)?;
        if !(b2.re.is_finite() && b2.im.is_finite()) {
            return Err(Error::Domain("beta2 is not finite"));
        }
        Ok((b1, b2))
    }

    /// Real parameters at a point, from the ab-form when one was given.
    pub fn ab(&self, zeta: C64, w: C64) -> Result<AbParams> {
        match &self.ab {
            Some(f) => Ok(f(zeta, w)),
            None => {
                let (b1, b2) = self.betas(zeta, w)?;
                ab_from_beta(b1, b2)
            }
        }
    }

    pub fn matrix(&self, zeta: C64, w: C64) -> Result<RealMatrix> {
        if self.fibered {
            let b2 = (self.beta2)(zeta, w);
            if !(b2.re.is_finite() && b2.im.is_finite()) {
                return Err(Error::Domain("beta2 is not finite"));
            }
            return Ok(fibered_matrix(b2));
        }
        let (b1, b2) = self.betas(zeta, w)?;
        j_matrix_from_beta(b1, b2)
    }

    pub fn q(&self, zeta: C64, w: C64) -> Result<Matrix2<C64>> {
        let (b1, b2) = self.betas(zeta, w)?;
        Ok(q_matrix(b1, b2))
    }
}

/// Structure matrix for `β1 = 0`.
pub fn fibered_matrix(beta2: C64) -> RealMatrix {
    let (r, i) = (beta2.re, beta2.im);
    RealMatrix::new(
        0.0,
        -1.0,
        2.0 * i,
        -2.0 * r,
        1.0,
        0.0,
        -2.0 * r,
        -2.0 * i,
        0.0,
        0.0,
        0.0,
        -1.0,
        0.0,
        0.0,
        1.0,
        0.0,
    )
}

/// Structure with `β1 = 0`: projection to `w` is pseudoholomorphic.
pub fn fibered_j(
    beta2: impl Fn(C64, C64) -> C64 + Send + Sync + 'static,
    regularity: Regularity,
) -> AlmostComplexStructure {
    AlmostComplexStructure {
        beta1: Arc::new(|_, _| C64::default()),
        beta2: Arc::new(beta2),
        ab: None,
        regularity,
        fibered: true,
    }
}

/// Integrable structure `β2(ζ, w) = ζ^2 conj(w)`.
pub fn quadratic_structure() -> AlmostComplexStructure {
    fibered_j(|zeta, w| zeta * zeta * w.conj(), Regularity::Smooth)
}

/// Continuous structure `β2(ζ, w) = dV/dwbar(w)`, equal to the standard one
/// outside the disks carrying `V`.
pub fn counterexample_structure(params: CounterexampleParams) -> AlmostComplexStructure {
    fibered_j(move |_, w| big_v(&params, w).jet.dbar, Regularity::Continuous)
}

/// Max over a `ζ` grid (at fixed `w`) of the centered-difference
/// `|dβ1/dζbar| + |dβ2/dζbar|`; zero up to rounding for integrable
/// structures in normal coordinates.
pub fn integrability_residual(acs: &AlmostComplexStructure, zeta_grid: &GridGeometry, w: C64) -> Result<f64> {
    let h = zeta_grid.spacing;
    let mut worst = 0.0f64;
    for idx in 0..zeta_grid.len() {
        let z = zeta_grid.point_at(idx);
        let mut total = 0.0;
        for f in [&acs.beta1, &acs.beta2] {
            let fx = (f(z + h, w) - f(z - h, w)) / (2.0 * h);
            let fy = (f(z + I * h, w) - f(z - I * h, w)) / (2.0 * h);
            total += cabs((fx + I * fy) * 0.5);
        }
        if !total.is_finite() {
            return Err(Error::Domain("structure coefficients not finite on the grid"));
        }
        worst = worst.max(total);
    }
    Ok(worst)
}

pub type ValueFn = Arc<dyn Fn(C64) -> Option<C64> + Send + Sync>;
/// `z -> (d/dz, d/dzbar)`.
pub type JetFn = Arc<dyn Fn(C64) -> Option<(C64, C64)> + Send + Sync>;
/// `(z, h) -> step`; `None` masks the point.
pub type StepFn = Arc<dyn Fn(C64, f64) -> Option<f64> + Send + Sync>;

/// One complex component of a curve.
#[derive(Clone)]
pub struct Component {
    pub value: ValueFn,
    pub jet: Option<JetFn>,
}

impl Component {
    pub fn new(value: impl Fn(C64) -> Option<C64> + Send + Sync + 'static) -> Self {
        Self { value: Arc::new(value), jet: None }
    }

    pub fn with_jet(mut self, jet: impl Fn(C64) -> Option<(C64, C64)> + Send + Sync + 'static) -> Self {
        self.jet = Some(Arc::new(jet));
        self
    }

    pub fn constant(c: C64) -> Self {
        Self::new(move |_| Some(c)).with_jet(|_| Some((C64::default(), C64::default())))
    }

    /// A holomorphic map as a curve component.
    pub fn holomorphic(map: AnalyticMap) -> Self {
        let m = Arc::new(map);
        let m2 = m.clone();
        Self::new(move |z| m.eval(z).ok()).with_jet(move |z| m2.derivative(z).ok().map(|d| (d, C64::default())))
    }
}

/// A parametrized curve `z -> (h(z), k(z))`.
#[derive(Clone)]
pub struct CurveParam {
    pub h: Component,
    pub k: Component,
    /// Local difference step; defaults to the grid spacing.
    pub step: Option<StepFn>,
}

impl core::fmt::Debug for CurveParam {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("CurveParam")
            .field("h_jet", &self.h.jet.is_some())
            .field("k_jet", &self.k.jet.is_some())
            .field("adaptive_step", &self.step.is_some())
            .finish()
    }
}

impl CurveParam {
    pub fn new(h: Component, k: Component) -> Self {
        Self { h, k, step: None }
    }

    pub fn eval(&self, z: C64) -> Option<(C64, C64)> {
        let h = (self.h.value)(z)?;
        let k = (self.k.value)(z)?;
        (h.is_finite() && k.is_finite()).then_some((h, k))
    }

    /// The fiber `z -> (z, c)`.
    pub fn fiber(c: C64) -> Self {
        Self::new(Component::holomorphic(AnalyticMap::identity()), Component::constant(c))
    }

    /// `z -> (h(z), c)` with `h` holomorphic.
    pub fn holomorphic_graph(h: AnalyticMap, c: C64) -> Self {
        Self::new(Component::holomorphic(h), Component::constant(c))
    }

    /// Replaces `k` by its conjugate; the result is not J-holomorphic for
    /// fibered structures unless `k` is constant.
    pub fn conjugate_k(&self) -> Self {
        let k = self.k.value.clone();
        let jet = self.k.jet.clone();
        let mut out = self.clone();
        out.k = Component { value: Arc::new(move |z| k(z).map(|v| v.conj())), jet: None };
        if let Some(j) = jet {
            out.k.jet = Some(Arc::new(move |z| j(z).map(|(dz, dbar)| (dbar.conj(), dz.conj()))));
        }
        out
    }

    fn step_at(&self, z: C64, h: f64) -> Option<f64> {
        match &self.step {
            Some(f) => f(z, h).filter(|s| *s > 0.0 && s.is_finite()),
            None => Some(h),
        }
    }

    /// Centered differences `(f_x, f_y)` of the real 4-vector at `z`.
    fn partials(&self, z: C64, d: f64) -> Option<(Vector4<f64>, Vector4<f64>)> {
        let f = |w: C64| self.eval(w).map(|(a, b)| to_real(a, b));
        let fx = (f(z + d)? - f(z - d)?) / (2.0 * d);
        let fy = (f(z + I * d)? - f(z - I * d)?) / (2.0 * d);
        Some((fx, fy))
    }
}

/// Zeros of `phi + (z - z0)^m conj(k^2 / 2)` make `h` blow up.
const POLE_TOL: f64 = 1e-12;

/// `h = -(z - z0)^m / (phi(z) + (z - z0)^m conj(k(z)^2 / 2))`, `k` holomorphic:
/// the curves through the `w`-axis at `z0` for [`quadratic_structure`].
pub fn zero_branch_curve(m: u32, phi: AnalyticMap, k: AnalyticMap, z0: C64) -> Result<CurveParam> {
    if m == 0 {
        return Err(Error::Domain("m must be at least 1"));
    }
    if cabs(phi.eval(z0)?) < POLE_TOL {
        return Err(Error::Domain("phi must not vanish at z0"));
    }
    let phi = Arc::new(phi);
    let k = Arc::new(k);
    let parts = {
        let (phi, k) = (phi.clone(), k.clone());
        move |z: C64| -> Option<(C64, C64, C64)> {
            let p = (z - z0).powu(m);
            let kz = k.eval(z).ok()?;
            let den = phi.eval(z).ok()? + p * (kz * kz * 0.5).conj();
            if cabs(den) < POLE_TOL {
                return None;
            }
            Some((-p / den, den, kz))
        }
    };
    let value = {
        let parts = parts.clone();
        move |z| parts(z).map(|(h, _, _)| h)
    };
    let k_jet = {
        let (phi, k) = (phi.clone(), k.clone());
        move |z: C64| -> Option<(C64, C64)> {
            let (h, den, kz) = parts(z)?;
            let dk = k.derivative(z).ok()?;
            let mf = m as f64;
            let pm1 = if m == 1 { c64(1.0, 0.0) } else { (z - z0).powu(m - 1) };
            let p = pm1 * (z - z0);
            let half_k2_bar = (kz * kz * 0.5).conj();
            // h = N / D with N = -p
            let dn = -pm1 * mf;
            let dden = phi.derivative(z).ok()? + pm1 * mf * half_k2_bar;
            let dz = (dn * den + p * dden) / (den * den);
            let dbar = h * h * kz.conj() * dk.conj();
            Some((dz, dbar))
        }
    };
    Ok(CurveParam::new(Component::new(value).with_jet(k_jet), Component::holomorphic((*k).clone())))
}

/// `h = -1 / (conj(k^2/2) - conj(k(z0)^2/2) + c(z) - 1/ζ0)` with `c(z0) = 0`:
/// the curves with `h(z0) = ζ0 != 0` for [`quadratic_structure`].
pub fn nonvanishing_branch_curve(k: AnalyticMap, c: AnalyticMap, z0: C64, zeta0: C64) -> Result<CurveParam> {
    if cabs(zeta0) == 0.0 {
        return Err(Error::Domain("zeta0 must be nonzero"));
    }
    if cabs(c.eval(z0)?) > 1e-12 {
        return Err(Error::Domain("c must vanish at z0"));
    }
    let k0 = k.eval(z0)?;
    let shift = (k0 * k0 * 0.5).conj() + zeta0.inv();
    let k = Arc::new(k);
    let c = Arc::new(c);
    let den = {
        let (k, c) = (k.clone(), c.clone());
        move |z: C64| -> Option<(C64, C64)> {
            let kz = k.eval(z).ok()?;
            let d = (kz * kz * 0.5).conj() - shift + c.eval(z).ok()?;
            (cabs(d) >= POLE_TOL).then_some((d, kz))
        }
    };
    let value = {
        let den = den.clone();
        move |z| den(z).map(|(d, _)| -d.inv())
    };
    let jet = {
        let (k, c) = (k.clone(), c.clone());
        move |z: C64| -> Option<(C64, C64)> {
            let (d, kz) = den(z)?;
            let dk = k.derivative(z).ok()?;
            // dD/dz = c', dD/dzbar = conj(k k')
            let dz = c.derivative(z).ok()? / (d * d);
            let dbar = (kz * dk).conj() / (d * d);
            Some((dz, dbar))
        }
    };
    Ok(CurveParam::new(Component::new(value).with_jet(jet), Component::holomorphic((*k).clone())))
}

/// Distance from `w` to the points where `V` is least regular: the disk
/// centers and the origin.
fn distance_to_singular_set(w: C64) -> f64 {
    let mut d = cabs(w);
    if d == 0.0 {
        return 0.0;
    }
    let guess = libm::round(-libm::log10(d)) as i64;
    for k in (guess - 1).max(1)..=(guess + 1).max(1) {
        d = d.min(cabs(w - CounterexampleParams::center(k as u32)));
    }
    d
}

/// `(V(k(z)) + c(z), k(z))`, J-holomorphic for [`counterexample_structure`].
///
/// The difference step at `z` is `h min(1, d / R_1)`, where `d` is the
/// distance (measured through `k`) from `k(z)` to the nearest disk center or
/// the origin. Scaling the step with `d` keeps the truncation error uniformly
/// `O(h^2)` up to the points where `V` is least regular. Points where `d` is
/// lost in rounding are masked.
pub fn counterexample_curve(params: CounterexampleParams, c: AnalyticMap, k: AnalyticMap) -> CurveParam {
    let k = Arc::new(k);
    let c = Arc::new(c);
    let value = {
        let (k, c) = (k.clone(), c.clone());
        move |z: C64| Some(big_v(&params, k.eval(z).ok()?).jet.value + c.eval(z).ok()?)
    };
    let jet = {
        let (k, c) = (k.clone(), c.clone());
        move |z: C64| -> Option<(C64, C64)> {
            let w = k.eval(z).ok()?;
            let dk = k.derivative(z).ok()?;
            let v = big_v(&params, w).jet;
            Some((v.dz * dk + c.derivative(z).ok()?, v.dbar * dk.conj()))
        }
    };
    let step = {
        let k = k.clone();
        move |z: C64, h: f64| -> Option<f64> {
            let w = k.eval(z).ok()?;
            let d = distance_to_singular_set(w);
            if d <= 16.0 * f64::EPSILON * hypot(w.re, w.im).max(f64::MIN_POSITIVE) {
                return None;
            }
            let dk = cabs(k.derivative(z).ok()?);
            let scale = if dk > 0.0 { d / (dk * CounterexampleParams::big_r(1)) } else { 1.0 };
            Some(h * scale.min(1.0))
        }
    };
    let mut curve = CurveParam::new(Component::new(value).with_jet(jet), Component::holomorphic((*k).clone()));
    curve.step = Some(Arc::new(step));
    curve
}

fn vec_inf(v: &Vector4<f64>) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Pointwise residual `max(|f_y - J f_x|, |f_x + J f_y|)` (sup norm) of the
/// J-holomorphy equation, using centered differences of the curve.
///
/// Points where the curve or its stencil is undefined are masked. Fails if
/// the curve's image leaves the region where the structure is defined.
pub fn jholo_residual_field(
    curve: &CurveParam,
    acs: &AlmostComplexStructure,
    geom: GridGeometry,
) -> Result<GridFunction> {
    let h = geom.spacing;
    let mut values = alloc::vec![C64::default(); geom.len()];
    let mut mask = alloc::vec![false; geom.len()];
    for (idx, out) in values.iter_mut().enumerate() {
        let z = geom.point_at(idx);
        let Some((zeta, w)) = curve.eval(z) else {
            mask[idx] = true;
            continue;
        };
        let Some((fx, fy)) = curve.step_at(z, h).and_then(|d| curve.partials(z, d)) else {
            mask[idx] = true;
            continue;
        };
        let j = acs.matrix(zeta, w)?;
        let r = vec_inf(&(fy - j * fx)).max(vec_inf(&(fx + j * fy)));
        if !r.is_finite() {
            mask[idx] = true;
            continue;
        }
        *out = c64(r, 0.0);
    }
    Ok(GridFunction::from_parts(geom, values, Some(mask)))
}

pub fn jholo_residual(curve: &CurveParam, acs: &AlmostComplexStructure, geom: GridGeometry) -> Result<ResidualReport> {
    ResidualReport::of_field(&jholo_residual_field(curve, acs, geom)?)
}

/// Residual of `(h_zbar, k_zbar) = Q(h, k) conj(h_z, k_z)` with
/// finite-difference Wirtinger derivatives, sup norm over both rows.
pub fn q_residual(curve: &CurveParam, acs: &AlmostComplexStructure, geom: GridGeometry) -> Result<ResidualReport> {
    let h = geom.spacing;
    let mut values = alloc::vec![C64::default(); geom.len()];
    let mut mask = alloc::vec![false; geom.len()];
    for (idx, out) in values.iter_mut().enumerate() {
        let z = geom.point_at(idx);
        let image = curve.eval(z);
        let parts = curve.step_at(z, h).and_then(|d| curve.partials(z, d));
        let (Some((zeta, w)), Some((fx, fy))) = (image, parts) else {
            mask[idx] = true;
            continue;
        };
        let (hx, kx) = to_complex(&fx);
        let (hy, ky) = to_complex(&fy);
        let wirt = |x: C64, y: C64| ((x - I * y) * 0.5, (x + I * y) * 0.5);
        let (h_z, h_bar) = wirt(hx, hy);
        let (k_z, k_bar) = wirt(kx, ky);
        let q = acs.q(zeta, w)?;
        let rhs = q * nalgebra::Vector2::new(h_z.conj(), k_z.conj());
        let r = cabs(h_bar - rhs[0]).max(cabs(k_bar - rhs[1]));
        if !r.is_finite() {
            mask[idx] = true;
            continue;
        }
        *out = c64(r, 0.0);
    }
    ResidualReport::of_field(&GridFunction::from_parts(geom, values, Some(mask)))
}
