//! Real scalar functions backed by `libm` so results do not depend on the
//! platform's system math library.

pub(crate) use libm::{atan, atan2, exp, hypot, log, log10, sqrt};

pub(crate) const PI: f64 = core::f64::consts::PI;
pub(crate) const FRAC_1_PI: f64 = core::f64::consts::FRAC_1_PI;

#[inline]
pub(crate) fn cabs(z: crate::C64) -> f64 {
    hypot(z.re, z.im)
}
