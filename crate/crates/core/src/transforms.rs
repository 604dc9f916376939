//! Cauchy and Beurling transforms of compactly supported grid data.
//!
//! Each source node is the center of a square cell of side `h` on which the
//! density is taken constant. The Cauchy kernel is normalised so that
//! `d/dzbar C(P) = P`:
//!
//! ```text
//! C(P)(z) =  (1/pi) ∬ P(w) / (z - w)   dA(w)
//! S(P)(z) = -(1/pi) PV∬ P(w) / (z - w)^2 dA(w)  = d/dz C(P)(z)
//! ```
//!
//! Off the cell containing `z` both integrals use the midpoint rule. On that
//! cell the Cauchy integral is evaluated in closed form; the Beurling
//! principal value over a centered square vanishes, so Beurling targets must
//! sit on cell centers.

use alloc::vec::Vec;

use crate::exec::{Executor, Serial};
use crate::grid::{self, Bounds, GridFunction, GridGeometry, ResidualReport};
use crate::math::{atan, cabs, log, FRAC_1_PI};
use crate::{c64, Error, Result, C64};

/// A transform sampled on a target grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformResult {
    pub grid: GridFunction,
    /// Union of the footprints of the unmasked source cells.
    pub source_support: Bounds,
    /// Number of unmasked source cells.
    pub quadrature_cells: usize,
}

/// Structure-of-arrays copy of the nonzero source cells.
struct Sources {
    idx: Vec<usize>,
    x: Vec<f64>,
    y: Vec<f64>,
    pr: Vec<f64>,
    pi: Vec<f64>,
    support: Bounds,
    cells: usize,
}

impl Sources {
    fn collect(p: &GridFunction) -> Result<Self> {
        let geom = p.geometry();
        let half = 0.5 * geom.spacing;
        let mut s = Sources {
            idx: Vec::new(),
            x: Vec::new(),
            y: Vec::new(),
            pr: Vec::new(),
            pi: Vec::new(),
            support: Bounds::new(c64(f64::INFINITY, f64::INFINITY), c64(f64::NEG_INFINITY, f64::NEG_INFINITY)),
            cells: 0,
        };
        for k in 0..geom.len() {
            let Some(v) = p.get(k) else { continue };
            let w = geom.point_at(k);
            s.cells += 1;
            s.support.min = c64(s.support.min.re.min(w.re - half), s.support.min.im.min(w.im - half));
            s.support.max = c64(s.support.max.re.max(w.re + half), s.support.max.im.max(w.im + half));
            if v == C64::default() {
                continue;
            }
            s.idx.push(k);
            s.x.push(w.re);
            s.y.push(w.im);
            s.pr.push(v.re);
            s.pi.push(v.im);
        }
        if s.cells == 0 {
            return Err(Error::EmptySupport);
        }
        Ok(s)
    }

    /// Position in the compacted arrays of the source cell containing `z`.
    fn cell_containing(&self, geom: &GridGeometry, z: C64) -> Option<usize> {
        let (i, j) = geom.nearest(z)?;
        self.idx.binary_search(&geom.index(i, j)).ok()
    }
}

/// `∬_cell 1/(z - w) dA(w)` for the square cell of side `h` centered at
/// `center`, exact for any `z`.
pub fn cell_integral(z: C64, center: C64, h: f64) -> C64 {
    // antiderivative of 1/zeta = (xi - i eta) / (xi^2 + eta^2) in both variables
    fn f(xi: f64, eta: f64) -> C64 {
        let r2 = xi * xi + eta * eta;
        if r2 == 0.0 {
            return C64::default();
        }
        let l = 0.5 * log(r2);
        let f1 = eta * l + if xi == 0.0 { 0.0 } else { xi * atan(eta / xi) };
        let f2 = xi * l + if eta == 0.0 { 0.0 } else { eta * atan(xi / eta) };
        c64(f1, -f2)
    }
    let d = z - center;
    let half = 0.5 * h;
    let (x0, x1) = (d.re - half, d.re + half);
    let (y0, y1) = (d.im - half, d.im + half);
    f(x1, y1) - f(x0, y1) - f(x1, y0) + f(x0, y0)
}

fn target_geometry(p: &GridFunction, target: Option<GridGeometry>) -> Result<GridGeometry> {
    match target {
        Some(t) => GridGeometry::new(t.origin, t.spacing, t.nx, t.ny),
        None => Ok(*p.geometry()),
    }
}

/// Cauchy transform of `p` on `target` (default: the source geometry).
pub fn cauchy_transform(p: &GridFunction, target: Option<GridGeometry>) -> Result<TransformResult> {
    cauchy_transform_with(p, target, &Serial)
}

/// [`cauchy_transform`] with the target loop driven by `exec`.
pub fn cauchy_transform_with(
    p: &GridFunction,
    target: Option<GridGeometry>,
    exec: &dyn Executor,
) -> Result<TransformResult> {
    let src = Sources::collect(p)?;
    let tgeom = target_geometry(p, target)?;
    let sgeom = *p.geometry();
    let h = sgeom.spacing;
    let weight = h * h * FRAC_1_PI;

    let values = exec.map_indexed(tgeom.len(), &|t| {
        let z = tgeom.point_at(t);
        let skip = src.cell_containing(&sgeom, z);
        let (zx, zy) = (z.re, z.im);
        let (mut sr, mut si) = (0.0, 0.0);
        let mut acc = |lo: usize, hi: usize| {
            for k in lo..hi {
                let dx = zx - src.x[k];
                let dy = zy - src.y[k];
                let inv = 1.0 / (dx * dx + dy * dy);
                sr += (src.pr[k] * dx + src.pi[k] * dy) * inv;
                si += (src.pi[k] * dx - src.pr[k] * dy) * inv;
            }
        };
        let n = src.idx.len();
        let mut out = match skip {
            Some(s) => {
                acc(0, s);
                acc(s + 1, n);
                let centre = c64(src.x[s], src.y[s]);
                c64(src.pr[s], src.pi[s]) * cell_integral(z, centre, h) * FRAC_1_PI
            }
            None => {
                acc(0, n);
                C64::default()
            }
        };
        out += c64(sr, si) * weight;
        out
    });
    Ok(TransformResult {
        grid: GridFunction::from_parts(tgeom, values, None),
        source_support: src.support,
        quadrature_cells: src.cells,
    })
}

/// Beurling transform of `p` on `target` (default: the source geometry).
///
/// A target lying inside a nonzero source cell must coincide with its center
/// (to `1e-9 h`), otherwise [`Error::OffCenterTarget`] is returned.
pub fn beurling_transform(p: &GridFunction, target: Option<GridGeometry>) -> Result<TransformResult> {
    beurling_transform_with(p, target, &Serial)
}

/// [`beurling_transform`] with the target loop driven by `exec`.
pub fn beurling_transform_with(
    p: &GridFunction,
    target: Option<GridGeometry>,
    exec: &dyn Executor,
) -> Result<TransformResult> {
    let src = Sources::collect(p)?;
    let tgeom = target_geometry(p, target)?;
    let sgeom = *p.geometry();
    let h = sgeom.spacing;

    for t in 0..tgeom.len() {
        let z = tgeom.point_at(t);
        if let Some(s) = src.cell_containing(&sgeom, z) {
            if cabs(z - c64(src.x[s], src.y[s])) > 1e-9 * h {
                return Err(Error::OffCenterTarget(z));
            }
        }
    }

    let weight = -h * h * FRAC_1_PI;
    let values = exec.map_indexed(tgeom.len(), &|t| {
        let z = tgeom.point_at(t);
        let skip = src.cell_containing(&sgeom, z);
        let (zx, zy) = (z.re, z.im);
        let (mut sr, mut si) = (0.0, 0.0);
        let mut acc = |lo: usize, hi: usize| {
            for k in lo..hi {
                let dx = zx - src.x[k];
                let dy = zy - src.y[k];
                let r2 = dx * dx + dy * dy;
                let inv = 1.0 / (r2 * r2);
                // 1/d^2 = conj(d)^2 / |d|^4
                let a = (dx * dx - dy * dy) * inv;
                let b = -2.0 * dx * dy * inv;
                sr += src.pr[k] * a - src.pi[k] * b;
                si += src.pr[k] * b + src.pi[k] * a;
            }
        };
        let n = src.idx.len();
        match skip {
            Some(s) => {
                acc(0, s);
                acc(s + 1, n);
            }
            None => acc(0, n),
        }
        c64(sr, si) * weight
    });
    Ok(TransformResult {
        grid: GridFunction::from_parts(tgeom, values, None),
        source_support: src.support,
        quadrature_cells: src.cells,
    })
}

/// Splits every cell of `p` into `k x k` cells carrying the same value.
pub fn subdivide(p: &GridFunction, k: usize) -> Result<GridFunction> {
    if k == 0 {
        return Err(Error::Domain("subdivision factor must be at least 1"));
    }
    if k == 1 {
        return Ok(p.clone());
    }
    let g = p.geometry();
    let h = g.spacing / k as f64;
    let shift = 0.5 * (g.spacing - h);
    let geom = GridGeometry::new(g.origin - c64(shift, shift), h, g.nx * k, g.ny * k)?;
    let mut values = Vec::with_capacity(geom.len());
    let mut mask = Vec::with_capacity(geom.len());
    for j in 0..geom.ny {
        for i in 0..geom.nx {
            let src = g.index(i / k, j / k);
            values.push(p.values()[src]);
            mask.push(p.is_masked_at(src));
        }
    }
    Ok(GridFunction::from_parts(geom, values, Some(mask)))
}

/// Residual fields `dbar(C(P)) - P` and `dz(C(P)) - S(P)` on the source grid.
pub fn transform_identity_fields(p: &GridFunction) -> Result<(GridFunction, GridFunction)> {
    transform_identity_fields_with(p, &Serial)
}

pub fn transform_identity_fields_with(
    p: &GridFunction,
    exec: &dyn Executor,
) -> Result<(GridFunction, GridFunction)> {
    let c = cauchy_transform_with(p, None, exec)?;
    let s = beurling_transform_with(p, None, exec)?;
    let zero_masked = p.map(|_, v| Some(v));
    let r1 = grid::dbar(&c.grid)?.zip_with(&zero_masked, |a, b| a - b)?;
    let r2 = grid::dz(&c.grid)?.zip_with(&s.grid, |a, b| a - b)?;
    Ok((r1, r2))
}

/// Reports on `dbar(C(P)) - P` and `dz(C(P)) - S(P)` over interior unmasked
/// nodes.
pub fn verify_transform_identities(p: &GridFunction) -> Result<(ResidualReport, ResidualReport)> {
    verify_transform_identities_with(p, &Serial)
}

pub fn verify_transform_identities_with(
    p: &GridFunction,
    exec: &dyn Executor,
) -> Result<(ResidualReport, ResidualReport)> {
    let (r1, r2) = transform_identity_fields_with(p, exec)?;
    Ok((ResidualReport::of_field(&r1)?, ResidualReport::of_field(&r2)?))
}

/// `sigma(z) = exp(C(A1)(z)) (u(z) - w0)` on the nodes of `u` inside
/// `support`, where `A1 = -A` off the zero set `{u = w0}` and `0` on it.
///
/// If `u_zbar = A (u - w0)` then `sigma` is holomorphic, and it vanishes on
/// exactly the nodes where `u = w0`. Nodes where `A` is undefined or
/// non-finite contribute zero density.
pub fn sigma_function(
    u: &GridFunction,
    w0: C64,
    a: impl Fn(C64) -> Option<C64>,
    support: Bounds,
) -> Result<GridFunction> {
    sigma_function_with(u, w0, a, support, &Serial)
}

pub fn sigma_function_with(
    u: &GridFunction,
    w0: C64,
    a: impl Fn(C64) -> Option<C64>,
    support: Bounds,
    exec: &dyn Executor,
) -> Result<GridFunction> {
    let rect = u.geometry().nodes_within(support).ok_or(Error::BadRectangle)?;
    let sub = u.subgrid(rect)?;
    let geom = *sub.geometry();
    let density: Vec<C64> = (0..geom.len())
        .map(|k| match sub.get(k) {
            Some(v) if v != w0 => a(geom.point_at(k)).filter(grid::is_finite).map_or(C64::default(), |x| -x),
            _ => C64::default(),
        })
        .collect();
    let a1 = GridFunction::from_parts(geom, density, None);
    let c = cauchy_transform_with(&a1, None, exec)?;
    let values: Vec<C64> = (0..geom.len())
        .map(|k| match sub.get(k) {
            Some(v) => c.grid.values()[k].exp() * (v - w0),
            None => C64::default(),
        })
        .collect();
    let mask: Vec<bool> = (0..geom.len()).map(|k| sub.is_masked_at(k)).collect();
    Ok(GridFunction::from_parts(geom, values, Some(mask)))
}
