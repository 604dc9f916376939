//! A differentiable function `V` on the plane whose zbar-derivative is
//! continuous while its z-derivative is unbounded near the origin.
//!
//! Building blocks:
//!
//! ```text
//! v(z)    = z sqrt(-ln |z|^2)                              (|z| < 1)
//! V_t(z)  = kappa(|z|) z |z|^(2t) sqrt(-ln |z|^2)          (0 < t <= 1/2)
//! V(z)    = sum_k 2^-k r_k V_{t_k}((z - R_k e^(i pi/4)) / r_k)
//! ```
//!
//! with `R_k = 10^-k`, `r_k = 10^-(k+1)` and `t_k = 2^-4k`. The disks
//! `|z - R_k e^(i pi/4)| < r_k` are pairwise disjoint, so at most one term
//! is nonzero at any point.
//!
//! Near the blow-up points the local coordinate underflows double
//! precision, so `V_t` is evaluated from `ln|ζ|` and `arg ζ` rather than
//! from `ζ` itself.

use crate::math::{atan2, cabs, exp, log, log10, sqrt};
use crate::{c64, Error, Result, C64};

/// `e^(-1/2)`: `kappa` vanishes from here on.
pub const KAPPA_OUTER: f64 = 0.606_530_659_712_633_4;
/// `kappa` equals one up to here.
pub const KAPPA_INNER: f64 = 0.5;

/// Value and Wirtinger derivatives at a point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet {
    pub value: C64,
    pub dz: C64,
    pub dbar: C64,
}

/// The smooth step `s(t) = phi(t) / (phi(t) + phi(1 - t))`,
/// `phi(t) = exp(-1/t)` for `t > 0`, and its derivative.
fn smooth_step(t: f64) -> (f64, f64) {
    if t <= 0.0 {
        return (0.0, 0.0);
    }
    if t >= 1.0 {
        return (1.0, 0.0);
    }
    let a = 1.0 / t;
    let b = 1.0 / (1.0 - t);
    // s = 1 / (1 + exp(a - b)),  s' = s (1 - s) (a^2 + b^2)
    let e = a - b;
    let s = if e > 700.0 { 0.0 } else { 1.0 / (1.0 + exp(e)) };
    (s, s * (1.0 - s) * (a * a + b * b))
}

/// Cutoff `kappa(x)` and `kappa'(x)`: one on `(0, 1/2]`, zero on
/// `[e^(-1/2), inf)`, a smooth decreasing step in between.
pub fn kappa(x: f64) -> Result<(f64, f64)> {
    if !(x > 0.0) {
        return Err(Error::Domain("kappa is defined for x > 0"));
    }
    let width = KAPPA_OUTER - KAPPA_INNER;
    let (s, ds) = smooth_step((KAPPA_OUTER - x) / width);
    Ok((s, -ds / width))
}

/// `v`, with derivatives only away from the origin where they exist.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasicEval {
    pub value: C64,
    /// `(dz, dbar)`, `None` at `z = 0`.
    pub derivatives: Option<(C64, C64)>,
}

/// `v(z) = z sqrt(-ln|z|^2)` on the unit disk.
pub fn v_basic(z: C64) -> Result<BasicEval> {
    let r = cabs(z);
    if !(r < 1.0) {
        return Err(Error::Domain("v is defined on |z| < 1"));
    }
    if r == 0.0 {
        return Ok(BasicEval { value: C64::default(), derivatives: None });
    }
    let l = sqrt(-2.0 * log(r));
    let phase2 = z / z.conj();
    let dz = c64(l - 0.5 / l, 0.0);
    let dbar = -phase2 / (2.0 * l);
    Ok(BasicEval { value: z * l, derivatives: Some((dz, dbar)) })
}

/// `V_t` at the point `e^(lambda + i theta)`, i.e. from `ln|ζ|` and `arg ζ`.
pub fn vt_polar(lambda: f64, theta: f64, t: f64) -> Result<Jet> {
    if !(t > 0.0 && t <= 0.5) {
        return Err(Error::Domain("t must lie in (0, 1/2]"));
    }
    if lambda == f64::NEG_INFINITY {
        return Ok(Jet::default());
    }
    if !(lambda < 0.0) {
        return Ok(Jet::default());
    }
    let rho = exp(lambda);
    let (k, dk) = if rho > 0.0 { kappa(rho)? } else { (1.0, 0.0) };
    if k == 0.0 && dk == 0.0 {
        return Ok(Jet::default());
    }
    let unit = c64(libm::cos(theta), libm::sin(theta));
    let phase2 = unit * unit;
    let s = -2.0 * lambda;
    let l = sqrt(s);
    let p = exp(2.0 * t * lambda);
    let zeta = unit * rho;
    // d/dzbar kappa(|z|) = kappa' z / (2|z|), d/dz kappa(|z|) = kappa' zbar / (2|z|)
    let dk_bar = unit * (0.5 * dk);
    let dk_z = unit.conj() * (0.5 * dk);
    let radial = zeta * (p * l);
    let value = radial * k;
    let dbar = dk_bar * radial + phase2 * (k * (t * p * l - 0.5 * p / l));
    let dz = dk_z * radial + c64(k * ((1.0 + t) * p * l - 0.5 * p / l), 0.0);
    Ok(Jet { value, dz, dbar })
}

/// `V_t(ζ)` for a point given directly.
pub fn vt(zeta: C64, t: f64) -> Result<Jet> {
    if !(t > 0.0 && t <= 0.5) {
        return Err(Error::Domain("t must lie in (0, 1/2]"));
    }
    let r = cabs(zeta);
    if r == 0.0 || r >= 1.0 {
        return Ok(Jet::default());
    }
    vt_polar(log(r), atan2(zeta.im, zeta.re), t)
}

/// Largest `k` for which evaluation is supported.
pub const K_LIMIT: u32 = 20;

/// Disk schedule of `V` and the evaluation cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CounterexampleParams {
    /// Disks with index above `k_max` are treated as truncated.
    pub k_max: u32,
}

impl Default for CounterexampleParams {
    fn default() -> Self {
        Self { k_max: 12 }
    }
}

const DIAGONAL: C64 = C64::new(core::f64::consts::FRAC_1_SQRT_2, core::f64::consts::FRAC_1_SQRT_2);

impl CounterexampleParams {
    pub fn new(k_max: u32) -> Result<Self> {
        let p = Self { k_max };
        p.check()?;
        Ok(p)
    }

    /// Disk distance from the origin, `R_k = 10^-k`.
    pub fn big_r(k: u32) -> f64 {
        libm::pow(10.0, -(k as f64))
    }

    /// Disk radius, `r_k = 10^-(k+1)`.
    pub fn small_r(k: u32) -> f64 {
        libm::pow(10.0, -(k as f64 + 1.0))
    }

    /// Exponent used on disk `k`, `t_k = 2^-4k`.
    pub fn t(k: u32) -> f64 {
        libm::pow(2.0, -4.0 * k as f64)
    }

    pub fn center(k: u32) -> C64 {
        DIAGONAL * Self::big_r(k)
    }

    /// Verifies `1 <= k_max <= 20`, `R_k - r_k > R_{k+1} + r_{k+1}` and
    /// `t_k` in `(0, 1/2]` for every `k <= k_max`.
    pub fn check(&self) -> Result<()> {
        if self.k_max == 0 || self.k_max > K_LIMIT {
            return Err(Error::Domain("k_max must lie in 1..=20"));
        }
        for k in 1..=self.k_max {
            if !(Self::big_r(k) - Self::small_r(k) > Self::big_r(k + 1) + Self::small_r(k + 1)) {
                return Err(Error::Domain("disk schedule overlaps"));
            }
            let t = Self::t(k);
            if !(t > 0.0 && t <= 0.5) {
                return Err(Error::Domain("t_k out of range"));
            }
        }
        Ok(())
    }

    /// Index of the disk containing `z`, whether or not it is above `k_max`.
    pub fn disk_of(z: C64) -> Option<u32> {
        let r = cabs(z);
        if r == 0.0 || !r.is_finite() {
            return None;
        }
        let guess = libm::round(-log10(r));
        if !(guess.is_finite()) {
            return None;
        }
        let guess = guess as i64;
        (guess - 1..=guess + 1)
            .filter(|&k| (1..=300).contains(&k))
            .map(|k| k as u32)
            .find(|&k| cabs(z - Self::center(k)) < Self::small_r(k))
    }
}

/// `V` at a point, with the disk it lies in.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VEval {
    pub jet: Jet,
    pub disk: Option<u32>,
    /// The point lies in a disk beyond `k_max`; the returned jet is zero.
    pub truncated: bool,
}

/// Evaluates `V`, `dV/dz` and `dV/dzbar`.
pub fn big_v(params: &CounterexampleParams, z: C64) -> VEval {
    let Some(k) = CounterexampleParams::disk_of(z) else {
        return VEval::default();
    };
    if k > params.k_max {
        return VEval { jet: Jet::default(), disk: Some(k), truncated: true };
    }
    let r = CounterexampleParams::small_r(k);
    let zeta = (z - CounterexampleParams::center(k)) / r;
    let local = vt(zeta, CounterexampleParams::t(k)).expect("t_k is in range");
    let scale = libm::pow(2.0, -(k as f64));
    VEval {
        jet: Jet { value: local.value * (scale * r), dz: local.dz * scale, dbar: local.dbar * scale },
        disk: Some(k),
        truncated: false,
    }
}

/// A blow-up point `z_k = r_k exp(-2^(4k-2)) + R_k e^(i pi/4)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlowupPoint {
    pub k: u32,
    /// `z_k` rounded to double precision; for `k >= 2` it coincides with the
    /// disk center.
    pub z: C64,
    /// `ln|ζ_k| = -2^(4k-2)` in the disk's local coordinate.
    pub local_log_modulus: f64,
    pub dz: C64,
    pub dbar: C64,
}

/// `dV/dz` and `dV/dzbar` at `z_k`, evaluated in the local coordinate so
/// the result stays exact where `z_k` itself is not representable.
pub fn blowup_sequence(params: &CounterexampleParams, k: u32) -> Result<BlowupPoint> {
    if k == 0 || k > params.k_max {
        return Err(Error::Domain("k must lie in 1..=k_max"));
    }
    let lambda = -libm::pow(2.0, 4.0 * k as f64 - 2.0);
    let local = vt_polar(lambda, 0.0, CounterexampleParams::t(k))?;
    let scale = libm::pow(2.0, -(k as f64));
    let r = CounterexampleParams::small_r(k);
    Ok(BlowupPoint {
        k,
        z: CounterexampleParams::center(k) + exp(lambda) * r,
        local_log_modulus: lambda,
        dz: local.dz * scale,
        dbar: local.dbar * scale,
    })
}

/// `2^k / sqrt(2e)`.
pub fn blowup_value(k: u32) -> f64 {
    libm::pow(2.0, k as f64) / sqrt(2.0 * core::f64::consts::E)
}

/// `max |d/dzbar kappa(|z|)| = max |kappa'| / 2` over the transition band,
/// by a dense scan refined with golden-section search.
pub fn kappa_derivative_bound() -> f64 {
    let f = |x: f64| kappa(x).map(|(_, d)| 0.5 * d.abs()).unwrap_or(0.0);
    let n = 4096;
    let h = (KAPPA_OUTER - KAPPA_INNER) / n as f64;
    let (mut best_x, mut best) = (KAPPA_INNER, 0.0);
    for i in 0..=n {
        let x = KAPPA_INNER + i as f64 * h;
        let v = f(x);
        if v > best {
            best = v;
            best_x = x;
        }
    }
    let g = 0.5 * (sqrt(5.0) - 1.0);
    let (mut a, mut b) = ((best_x - h).max(KAPPA_INNER), (best_x + h).min(KAPPA_OUTER));
    for _ in 0..100 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    best.max(f(0.5 * (a + b)))
}

/// Uniform bound `B1 e^(-1/2) + 1/(2 sqrt(e)) + 1/2` on `|dV_t/dzbar|`
/// over `0 < t <= 1/2`, with `B1` from [`kappa_derivative_bound`].
///
/// The middle term is the maximum of `t |z|^(2t) sqrt(-ln|z|^2)` at
/// `t = 1/2`, and the last bounds `(1/2) |z|^(2t) / sqrt(-ln|z|^2)`.
pub fn bound_b2() -> f64 {
    let b1 = kappa_derivative_bound();
    b1 * KAPPA_OUTER + 0.5 / sqrt(core::f64::consts::E) + 0.5
}
