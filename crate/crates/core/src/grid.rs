//! Uniform-grid samples of complex functions and the finite-difference
//! machinery built on them.
//!
//! Samples live on the nodes `origin + h*(i + i*j)`, `0 <= i < nx`,
//! `0 <= j < ny`, stored row-major (`j` outer). A node can be masked to mark
//! a singularity or a point outside the domain of the sampled function; every
//! derived quantity propagates the mask instead of inventing values there.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::math::{cabs, log, sqrt};
use crate::{c64, Error, Result, C64};

/// Node layout of a uniform rectangular grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridGeometry {
    pub origin: C64,
    pub spacing: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridGeometry {
    pub fn new(origin: C64, spacing: f64, nx: usize, ny: usize) -> Result<Self> {
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::InvalidSpacing(spacing));
        }
        if nx < 3 || ny < 3 {
            return Err(Error::GridTooSmall { nx, ny });
        }
        if !(origin.re.is_finite() && origin.im.is_finite()) {
            return Err(Error::Domain("grid origin must be finite"));
        }
        Ok(Self { origin, spacing, nx, ny })
    }

    /// Grid with nodes at `lower_left + h*(i + i*j)` reaching `upper_right`
    /// (rounded to the nearest whole number of steps).
    pub fn covering(lower_left: C64, upper_right: C64, spacing: f64) -> Result<Self> {
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::InvalidSpacing(spacing));
        }
        let steps = |a: f64, b: f64| ((b - a) / spacing + 0.5).max(0.0) as usize;
        let nx = steps(lower_left.re, upper_right.re) + 1;
        let ny = steps(lower_left.im, upper_right.im) + 1;
        Self::new(lower_left, spacing, nx, ny)
    }

    /// Square grid `[-half_width, half_width]^2` centered at `center`.
    pub fn centered(center: C64, half_width: f64, spacing: f64) -> Result<Self> {
        let n = (half_width / spacing + 0.5) as usize;
        let origin = center - c64(n as f64 * spacing, n as f64 * spacing);
        Self::new(origin, spacing, 2 * n + 1, 2 * n + 1)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.nx, idx / self.nx)
    }

    #[inline]
    pub fn point(&self, i: usize, j: usize) -> C64 {
        self.origin + c64(i as f64 * self.spacing, j as f64 * self.spacing)
    }

    #[inline]
    pub fn point_at(&self, idx: usize) -> C64 {
        let (i, j) = self.coords(idx);
        self.point(i, j)
    }

    /// Upper-right node.
    pub fn far_corner(&self) -> C64 {
        self.point(self.nx - 1, self.ny - 1)
    }

    /// Node closest to `z`, if `z` lies within half a step of the grid.
    pub fn nearest(&self, z: C64) -> Option<(usize, usize)> {
        let u = (z - self.origin) / self.spacing;
        let (i, j) = (libm::round(u.re), libm::round(u.im));
        if i < 0.0 || j < 0.0 || i >= self.nx as f64 || j >= self.ny as f64 {
            return None;
        }
        Some((i as usize, j as usize))
    }

    /// Index rectangle of the nodes lying inside `bounds`.
    pub fn nodes_within(&self, bounds: Bounds) -> Option<Rect> {
        let h = self.spacing;
        let eps = 1e-9;
        let lo = (bounds.min - self.origin) / h;
        let hi = (bounds.max - self.origin) / h;
        let i0 = libm::ceil(lo.re - eps).max(0.0) as usize;
        let j0 = libm::ceil(lo.im - eps).max(0.0) as usize;
        let i1f = libm::floor(hi.re + eps);
        let j1f = libm::floor(hi.im + eps);
        if i1f < 0.0 || j1f < 0.0 {
            return None;
        }
        let i1 = (i1f as usize).min(self.nx - 1);
        let j1 = (j1f as usize).min(self.ny - 1);
        (i0 <= i1 && j0 <= j1).then_some(Rect { i0, j0, i1, j1 })
    }

    pub fn bounds(&self) -> Bounds {
        Bounds { min: self.origin, max: self.far_corner() }
    }
}

/// Inclusive index rectangle `[i0, i1] x [j0, j1]` of grid nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rect {
    pub i0: usize,
    pub j0: usize,
    pub i1: usize,
    pub j1: usize,
}

impl Rect {
    pub fn width(&self) -> usize {
        self.i1 - self.i0 + 1
    }

    pub fn height(&self) -> usize {
        self.j1 - self.j0 + 1
    }
}

/// Axis-aligned rectangle in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub min: C64,
    pub max: C64,
}

impl Bounds {
    pub fn new(min: C64, max: C64) -> Self {
        Self { min, max }
    }

    pub fn contains(&self, z: C64) -> bool {
        z.re >= self.min.re && z.re <= self.max.re && z.im >= self.min.im && z.im <= self.max.im
    }
}

/// Complex samples on a [`GridGeometry`] with an optional exclusion mask.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    geom: GridGeometry,
    values: Vec<C64>,
    mask: Option<Vec<bool>>,
}

impl GridFunction {
    /// Builds a grid function from raw samples. `mask[k] == true` excludes
    /// node `k`; the unmasked nodes must form a 4-connected set.
    pub fn new(geom: GridGeometry, values: Vec<C64>, mask: Option<Vec<bool>>) -> Result<Self> {
        let geom = GridGeometry::new(geom.origin, geom.spacing, geom.nx, geom.ny)?;
        if values.len() != geom.len() {
            return Err(Error::SampleCount { expected: geom.len(), got: values.len() });
        }
        if let Some(m) = &mask {
            if m.len() != geom.len() {
                return Err(Error::SampleCount { expected: geom.len(), got: m.len() });
            }
        }
        let g = Self::from_parts(geom, values, mask);
        g.check_connected()?;
        Ok(g)
    }

    /// Like [`GridFunction::new`] but without the connectivity check, for
    /// masks that came out of a computation (e.g. a stored transform result).
    pub fn from_computed(geom: GridGeometry, values: Vec<C64>, mask: Option<Vec<bool>>) -> Result<Self> {
        let geom = GridGeometry::new(geom.origin, geom.spacing, geom.nx, geom.ny)?;
        if values.len() != geom.len() {
            return Err(Error::SampleCount { expected: geom.len(), got: values.len() });
        }
        if let Some(m) = &mask {
            if m.len() != geom.len() {
                return Err(Error::SampleCount { expected: geom.len(), got: m.len() });
            }
        }
        Ok(Self::from_parts(geom, values, mask))
    }

    /// Samples `f` at every node; non-finite values are masked.
    pub fn sample(geom: GridGeometry, f: impl Fn(C64) -> C64) -> Result<Self> {
        Self::sample_partial(geom, |z| Some(f(z)))
    }

    /// Samples `f` at every node, masking nodes where `f` returns `None` or a
    /// non-finite value.
    pub fn sample_partial(geom: GridGeometry, f: impl Fn(C64) -> Option<C64>) -> Result<Self> {
        let mut values = Vec::with_capacity(geom.len());
        let mut mask = Vec::with_capacity(geom.len());
        for idx in 0..geom.len() {
            match f(geom.point_at(idx)).filter(is_finite) {
                Some(v) => {
                    values.push(v);
                    mask.push(false);
                }
                None => {
                    values.push(C64::new(0.0, 0.0));
                    mask.push(true);
                }
            }
        }
        Self::new(geom, values, Some(mask))
    }

    pub(crate) fn from_parts(geom: GridGeometry, values: Vec<C64>, mask: Option<Vec<bool>>) -> Self {
        let mask = mask.filter(|m| m.iter().any(|&b| b));
        Self { geom, values, mask }
    }

    /// Additionally masks every node where `exclude` is true.
    pub fn with_excluded(&self, exclude: impl Fn(C64) -> bool) -> Result<Self> {
        let mask = (0..self.geom.len())
            .map(|k| self.is_masked_at(k) || exclude(self.geom.point_at(k)))
            .collect();
        let g = Self::from_parts(self.geom, self.values.clone(), Some(mask));
        g.check_connected()?;
        Ok(g)
    }

    #[inline]
    pub fn geometry(&self) -> &GridGeometry {
        &self.geom
    }

    #[inline]
    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn mask(&self) -> Option<&[bool]> {
        self.mask.as_deref()
    }

    #[inline]
    pub fn value(&self, i: usize, j: usize) -> C64 {
        self.values[self.geom.index(i, j)]
    }

    #[inline]
    pub fn is_masked(&self, i: usize, j: usize) -> bool {
        self.is_masked_at(self.geom.index(i, j))
    }

    #[inline]
    pub fn is_masked_at(&self, idx: usize) -> bool {
        self.mask.as_ref().is_some_and(|m| m[idx])
    }

    /// Value at node `idx`, or `None` when masked.
    #[inline]
    pub fn get(&self, idx: usize) -> Option<C64> {
        (!self.is_masked_at(idx)).then(|| self.values[idx])
    }

    pub fn unmasked_count(&self) -> usize {
        (0..self.values.len()).filter(|&k| !self.is_masked_at(k)).count()
    }

    /// Iterator over `(node, value)` for unmasked nodes.
    pub fn iter_unmasked(&self) -> impl Iterator<Item = (C64, C64)> + '_ {
        (0..self.values.len()).filter_map(move |k| self.get(k).map(|v| (self.geom.point_at(k), v)))
    }

    /// Pointwise map over unmasked nodes; `None` or non-finite results mask
    /// the node.
    pub fn map(&self, f: impl Fn(C64, C64) -> Option<C64>) -> GridFunction {
        let mut values = Vec::with_capacity(self.values.len());
        let mut mask = Vec::with_capacity(self.values.len());
        for k in 0..self.values.len() {
            let v = self.get(k).and_then(|v| f(self.geom.point_at(k), v)).filter(is_finite);
            mask.push(v.is_none());
            values.push(v.unwrap_or_default());
        }
        Self::from_parts(self.geom, values, Some(mask))
    }

    /// Pointwise combination of two grid functions on the same geometry;
    /// the result is masked wherever either input is.
    pub fn zip_with(&self, other: &GridFunction, f: impl Fn(C64, C64) -> C64) -> Result<GridFunction> {
        if self.geom != other.geom {
            return Err(Error::Precondition("grid geometries differ"));
        }
        let mut values = Vec::with_capacity(self.values.len());
        let mut mask = Vec::with_capacity(self.values.len());
        for k in 0..self.values.len() {
            let v = match (self.get(k), other.get(k)) {
                (Some(a), Some(b)) => Some(f(a, b)).filter(is_finite),
                _ => None,
            };
            mask.push(v.is_none());
            values.push(v.unwrap_or_default());
        }
        Ok(Self::from_parts(self.geom, values, Some(mask)))
    }

    pub fn conj(&self) -> GridFunction {
        Self::from_parts(self.geom, self.values.iter().map(|v| v.conj()).collect(), self.mask.clone())
    }

    /// Copy of the nodes inside `rect`.
    pub fn subgrid(&self, rect: Rect) -> Result<GridFunction> {
        if rect.i1 >= self.geom.nx || rect.j1 >= self.geom.ny || rect.i0 > rect.i1 || rect.j0 > rect.j1 {
            return Err(Error::BadRectangle);
        }
        let geom = GridGeometry::new(self.geom.point(rect.i0, rect.j0), self.geom.spacing, rect.width(), rect.height())?;
        let mut values = Vec::with_capacity(geom.len());
        let mut mask = Vec::with_capacity(geom.len());
        for j in rect.j0..=rect.j1 {
            for i in rect.i0..=rect.i1 {
                let k = self.geom.index(i, j);
                values.push(self.values[k]);
                mask.push(self.is_masked_at(k));
            }
        }
        Ok(Self::from_parts(geom, values, Some(mask)))
    }

    /// Unmasked nodes with `|g - w0| <= tol`.
    pub fn level_set(&self, w0: C64, tol: f64) -> Vec<(usize, usize)> {
        (0..self.values.len())
            .filter(|&k| self.get(k).is_some_and(|v| cabs(v - w0) <= tol))
            .map(|k| self.geom.coords(k))
            .collect()
    }

    fn check_connected(&self) -> Result<()> {
        let Some(mask) = &self.mask else { return Ok(()) };
        let total = mask.iter().filter(|&&m| !m).count();
        let Some(start) = mask.iter().position(|&m| !m) else { return Ok(()) };
        let (nx, ny) = (self.geom.nx, self.geom.ny);
        let mut seen = vec![false; mask.len()];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        let mut reached = 0usize;
        while let Some(k) = queue.pop_front() {
            reached += 1;
            let (i, j) = self.geom.coords(k);
            let mut visit = |n: usize| {
                if !mask[n] && !seen[n] {
                    seen[n] = true;
                    queue.push_back(n);
                }
            };
            if i > 0 {
                visit(k - 1);
            }
            if i + 1 < nx {
                visit(k + 1);
            }
            if j > 0 {
                visit(k - nx);
            }
            if j + 1 < ny {
                visit(k + nx);
            }
        }
        if reached == total {
            Ok(())
        } else {
            Err(Error::DisconnectedMask)
        }
    }
}

#[inline]
pub(crate) fn is_finite(z: &C64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// True if no two level-set nodes are 4-neighbours.
pub fn is_isolated(cells: &[(usize, usize)]) -> bool {
    let set: alloc::collections::BTreeSet<_> = cells.iter().copied().collect();
    cells.iter().all(|&(i, j)| {
        !set.contains(&(i + 1, j)) && !set.contains(&(i, j + 1))
    })
}

fn wirtinger(g: &GridFunction, sign: f64) -> Result<GridFunction> {
    let geom = g.geom;
    let (nx, ny) = (geom.nx, geom.ny);
    if nx < 3 || ny < 3 {
        return Err(Error::GridTooSmall { nx, ny });
    }
    let inv = 1.0 / (4.0 * geom.spacing);
    let mut values = vec![C64::new(0.0, 0.0); geom.len()];
    let mut mask = vec![true; geom.len()];
    for j in 1..ny - 1 {
        for i in 1..nx - 1 {
            let k = geom.index(i, j);
            let stencil = [k, k - 1, k + 1, k - nx, k + nx];
            if stencil.iter().any(|&s| g.is_masked_at(s)) {
                continue;
            }
            let dx = g.values[k + 1] - g.values[k - 1];
            let dy = g.values[k + nx] - g.values[k - nx];
            // (g_x + sign * i g_y) / 2 with 2h central differences
            values[k] = (dx + C64::new(-dy.im, dy.re) * sign) * inv;
            mask[k] = false;
        }
    }
    Ok(GridFunction::from_parts(geom, values, Some(mask)))
}

/// Central-difference `dg/dzbar = (g_x + i g_y) / 2` on interior nodes whose
/// four neighbours are unmasked. The boundary ring is masked.
pub fn dbar(g: &GridFunction) -> Result<GridFunction> {
    wirtinger(g, 1.0)
}

/// Central-difference `dg/dz = (g_x - i g_y) / 2`; masking as in [`dbar`].
pub fn dz(g: &GridFunction) -> Result<GridFunction> {
    wirtinger(g, -1.0)
}

/// Size of a residual field over its unmasked nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualReport {
    pub max_abs: f64,
    /// `sqrt(sum |r|^2 h^2)`
    pub l2: f64,
    pub num_points: usize,
    pub worst_point: C64,
    pub spacing: f64,
}

impl ResidualReport {
    /// Summarises the unmasked samples of a residual field.
    pub fn of_field(field: &GridFunction) -> Result<Self> {
        let h = field.geom.spacing;
        let mut max_abs = 0.0f64;
        let mut sum_sq = 0.0;
        let mut num_points = 0usize;
        let mut worst_point = None;
        for (z, r) in field.iter_unmasked() {
            let a = cabs(r);
            sum_sq += a * a;
            num_points += 1;
            if worst_point.is_none() || a > max_abs {
                max_abs = a;
                worst_point = Some(z);
            }
        }
        let worst_point = worst_point.ok_or(Error::NoInteriorPoints)?;
        Ok(Self { max_abs, l2: sqrt(sum_sq) * h, num_points, worst_point, spacing: h })
    }

    /// Grid area covered by the reporting points.
    pub fn area(&self) -> f64 {
        self.num_points as f64 * self.spacing * self.spacing
    }
}

/// Field `dbar(g)(z) - rhs(z, g(z))` on the nodes where `dbar(g)` exists.
pub fn cr_residual_field(g: &GridFunction, rhs: impl Fn(C64, C64) -> Option<C64>) -> Result<GridFunction> {
    let d = dbar(g)?;
    let mut values = vec![C64::new(0.0, 0.0); d.values.len()];
    let mut mask = vec![true; d.values.len()];
    for k in 0..d.values.len() {
        if d.is_masked_at(k) {
            continue;
        }
        let z = d.geom.point_at(k);
        let r = rhs(z, g.values[k]).filter(is_finite).ok_or(Error::RhsFailed(z))?;
        values[k] = d.values[k] - r;
        mask[k] = false;
    }
    Ok(GridFunction::from_parts(d.geom, values, Some(mask)))
}

/// Residual of `u_zbar = E(z, u)` over interior unmasked nodes.
pub fn cr_residual(g: &GridFunction, rhs: impl Fn(C64, C64) -> Option<C64>) -> Result<ResidualReport> {
    ResidualReport::of_field(&cr_residual_field(g, rhs)?)
}

/// Both sides of the rectangle Green identity `∮ g dz = 2i ∬ g_zbar`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenCheck {
    pub contour: C64,
    pub area: C64,
    pub discrepancy: f64,
}

/// Compares the trapezoid contour integral of `g` around the node rectangle
/// `rect` with `2i` times the area integral of `dbar(g)`.
///
/// The area side is a midpoint sum over the cells of `rect`, with the
/// cell-center value of `dbar(g)` taken as the mean of the four corner
/// values; both sides are second order.
pub fn green_check(g: &GridFunction, rect: Rect) -> Result<GreenCheck> {
    let geom = g.geom;
    let interior = rect.i0 >= 1
        && rect.j0 >= 1
        && rect.i1 + 2 <= geom.nx
        && rect.j1 + 2 <= geom.ny
        && rect.i0 < rect.i1
        && rect.j0 < rect.j1;
    if !interior {
        return Err(Error::BadRectangle);
    }
    for j in rect.j0 - 1..=rect.j1 + 1 {
        for i in rect.i0 - 1..=rect.i1 + 1 {
            if g.is_masked(i, j) {
                return Err(Error::BadRectangle);
            }
        }
    }
    let h = geom.spacing;
    let d = dbar(g)?;

    let edge = |pts: &mut dyn Iterator<Item = C64>, step: C64| -> C64 {
        let vals: Vec<C64> = pts.collect();
        let n = vals.len();
        let inner: C64 = vals[1..n - 1].iter().sum();
        (inner + (vals[0] + vals[n - 1]) * 0.5) * step
    };
    let bottom = edge(&mut (rect.i0..=rect.i1).map(|i| g.value(i, rect.j0)), c64(h, 0.0));
    let right = edge(&mut (rect.j0..=rect.j1).map(|j| g.value(rect.i1, j)), c64(0.0, h));
    let top = edge(&mut (rect.i0..=rect.i1).rev().map(|i| g.value(i, rect.j1)), c64(-h, 0.0));
    let left = edge(&mut (rect.j0..=rect.j1).rev().map(|j| g.value(rect.i0, j)), c64(0.0, -h));
    let contour = bottom + right + top + left;

    let mut sum = C64::new(0.0, 0.0);
    for j in rect.j0..rect.j1 {
        for i in rect.i0..rect.i1 {
            sum += (d.value(i, j) + d.value(i + 1, j) + d.value(i, j + 1) + d.value(i + 1, j + 1)) * 0.25;
        }
    }
    let area = C64::new(0.0, 2.0) * sum * (h * h);
    Ok(GreenCheck { contour, area, discrepancy: cabs(contour - area) })
}

/// Fitted Hölder exponent and the matching constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderEstimate {
    pub alpha: f64,
    pub constant: f64,
    pub pairs_used: usize,
}

/// Increments below this are treated as zero.
pub const HOLDER_FLAT_TOL: f64 = 1e-14;
/// Lower clamp for the fitted exponent.
pub const HOLDER_MIN_ALPHA: f64 = 1e-6;

/// Least-squares fit of `log|du|` against `log|dz|` over `num_pairs`
/// seeded random pairs of unmasked nodes.
///
/// `alpha` is clamped to `(0, 1]`; `constant` is the smallest `C` with
/// `|du| <= C |dz|^alpha` over the sampled pairs. A function that is flat on
/// every sampled pair reports `alpha = 1`, `constant = 0`.
pub fn holder_estimate(g: &GridFunction, num_pairs: usize, seed: u64) -> Result<HolderEstimate> {
    let nodes: Vec<usize> = (0..g.values.len()).filter(|&k| !g.is_masked_at(k)).collect();
    if nodes.len() < 2 {
        return Err(Error::TooFewPoints);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::with_capacity(num_pairs);
    for _ in 0..num_pairs {
        let a = nodes[rng.random_range(0..nodes.len())];
        let mut b = nodes[rng.random_range(0..nodes.len() - 1)];
        if b == a {
            b = nodes[nodes.len() - 1];
        }
        let dz = cabs(g.geom.point_at(a) - g.geom.point_at(b));
        let du = cabs(g.values[a] - g.values[b]);
        pairs.push((dz, du));
    }
    if pairs.iter().all(|&(dz, _)| dz == 0.0) {
        return Err(Error::CoincidentPairs);
    }
    if pairs.iter().all(|&(_, du)| du < HOLDER_FLAT_TOL) {
        return Ok(HolderEstimate { alpha: 1.0, constant: 0.0, pairs_used: pairs.len() });
    }

    let fit: Vec<(f64, f64)> =
        pairs.iter().filter(|&&(dz, du)| dz > 0.0 && du >= HOLDER_FLAT_TOL).map(|&(dz, du)| (log(dz), log(du))).collect();
    let n = fit.len() as f64;
    let mx = fit.iter().map(|p| p.0).sum::<f64>() / n;
    let my = fit.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = fit.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = fit.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= 0.0 {
        return Err(Error::CoincidentPairs);
    }
    let alpha = (sxy / sxx).clamp(HOLDER_MIN_ALPHA, 1.0);
    let constant = pairs
        .iter()
        .filter(|&&(dz, _)| dz > 0.0)
        .map(|&(dz, du)| du / libm::pow(dz, alpha))
        .fold(0.0f64, f64::max);
    Ok(HolderEstimate { alpha, constant, pairs_used: fit.len() })
}
