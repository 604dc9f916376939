//! JSON and string arguments accepted on the command line.
//!
//! Complex numbers are `[re, im]` arrays. Every JSON argument may be given
//! inline (starting with `{` or `[`) or as a path to a file.

use std::path::Path;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use crkit_core::almost_complex::{
    counterexample_curve, counterexample_structure, fibered_j, nonvanishing_branch_curve, quadratic_structure,
    zero_branch_curve, AlmostComplexStructure, CurveParam, Regularity,
};
use crkit_core::counterexample::CounterexampleParams;
use crkit_core::separable::{power_antiderivative, AnalyticMap, ZFn};
use crkit_core::series::LaurentSeries;
use crkit_core::{GridGeometry, C64};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::report::SeriesJson;

pub type Cx = [f64; 2];

pub fn cx(v: Cx) -> C64 {
    C64::new(v[0], v[1])
}

/// Parses `re,im`.
pub fn parse_complex(s: &str) -> Result<C64> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [re, im] = parts.as_slice() else { bail!("expected `re,im`, got `{s}`") };
    Ok(C64::new(re.parse().context("real part")?, im.parse().context("imaginary part")?))
}

/// Parses a grid spec `re,im,h,nx,ny`: origin, spacing and node counts.
pub fn parse_grid(s: &str) -> Result<GridGeometry> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [re, im, h, nx, ny] = parts.as_slice() else {
        bail!("grid spec must be `re,im,h,nx,ny`, got `{s}`")
    };
    let origin = C64::new(re.parse().context("grid origin re")?, im.parse().context("grid origin im")?);
    Ok(GridGeometry::new(origin, h.parse().context("grid spacing")?, nx.parse().context("nx")?, ny.parse().context("ny")?)?)
}

/// Parses `1..5` (inclusive) or a single index.
pub fn parse_k_range(s: &str) -> Result<Vec<u32>> {
    match s.split_once("..") {
        Some((a, b)) => {
            let (a, b): (u32, u32) = (a.trim().parse()?, b.trim().parse()?);
            if a > b {
                bail!("empty range `{s}`");
            }
            Ok((a..=b).collect())
        }
        None => Ok(vec![s.trim().parse().with_context(|| format!("bad k `{s}`"))?]),
    }
}

pub fn load_json<T: DeserializeOwned>(arg: &str) -> Result<T> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        return serde_json::from_str(t).context("parsing inline JSON");
    }
    let text = std::fs::read_to_string(Path::new(arg)).with_context(|| format!("reading {arg}"))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {arg}"))
}

/// A holomorphic map.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapSpec {
    Identity,
    Constant { c: Cx },
    /// `w - p`
    Shift { p: Cx },
    /// `sum c_j w^j`
    Polynomial { coeffs: Vec<Cx> },
    /// `a exp(b w) + c`
    Exp { a: Cx, b: Cx, #[serde(default)] c: Cx },
    /// `a Log(b w)` with the cut pointing away from `b * reference`.
    Log { a: Cx, b: Cx, reference: Cx },
    Laurent { center: Cx, min_index: i64, coeffs: Vec<Cx> },
}

impl MapSpec {
    pub fn build(&self) -> AnalyticMap {
        let cs = |v: &[Cx]| v.iter().copied().map(cx).collect::<Vec<_>>();
        match self {
            Self::Identity => AnalyticMap::identity(),
            Self::Constant { c } => AnalyticMap::constant(cx(*c)),
            Self::Shift { p } => AnalyticMap::shift(cx(*p)),
            Self::Polynomial { coeffs } => AnalyticMap::polynomial(&cs(coeffs)),
            Self::Exp { a, b, c } => AnalyticMap::Exp { a: cx(*a), b: cx(*b), c: cx(*c) },
            Self::Log { a, b, reference } => AnalyticMap::log_avoiding(cx(*a), cx(*b), cx(*reference)),
            Self::Laurent { center, min_index, coeffs } => {
                AnalyticMap::LaurentPoly(LaurentSeries::new(cx(*center), *min_index, cs(coeffs)))
            }
        }
    }
}

/// A zbar-antiderivative `G` together with `g = dG/dzbar`.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GSpec {
    /// `G = sum c_j zbar^j`
    ConjPolynomial { coeffs: Vec<Cx> },
    /// `G = (2/(1+alpha)) zbar |z|^(alpha-1)`, `g = |z|^(alpha-1)`
    PowerWeight { alpha: f64 },
}

impl GSpec {
    pub fn big_g(&self) -> ZFn {
        match self.clone() {
            Self::ConjPolynomial { coeffs } => {
                let cs: Vec<C64> = coeffs.into_iter().map(cx).collect();
                Arc::new(move |z: C64| horner(&cs, z.conj()))
            }
            Self::PowerWeight { alpha } => Arc::new(move |z| power_antiderivative(alpha, z)),
        }
    }

    pub fn small_g(&self) -> ZFn {
        match self.clone() {
            Self::ConjPolynomial { coeffs } => {
                let ds: Vec<C64> = coeffs.iter().enumerate().skip(1).map(|(j, &c)| cx(c) * j as f64).collect();
                Arc::new(move |z: C64| horner(&ds, z.conj()))
            }
            Self::PowerWeight { alpha } => Arc::new(move |z: C64| C64::from(z.norm().powf(alpha - 1.0))),
        }
    }
}

fn horner(cs: &[C64], x: C64) -> C64 {
    cs.iter().rev().fold(C64::default(), |acc, &c| acc * x + c)
}

/// `solve nonvanishing`: `u_zbar = g(z) / F'(u)` through `u(z0) = w0`.
#[derive(Debug, Clone, Deserialize)]
pub struct NonvanishingParams {
    pub big_f: MapSpec,
    pub g: GSpec,
    pub z0: Cx,
    pub w0: Cx,
    pub c: MapSpec,
}

/// `solve simple-zero`: `u_zbar = f(u) g(z)` with `f` a series with a simple
/// zero at its center `w0`.
#[derive(Debug, Clone, Deserialize)]
pub struct SimpleZeroParams {
    pub f: SeriesJson,
    pub g: GSpec,
    pub z0: Cx,
    pub b: MapSpec,
    #[serde(default = "default_order")]
    pub order: usize,
}

fn default_order() -> usize {
    crkit_core::series::DEFAULT_ORDER
}

/// `solve multiplicity`: `u_zbar = u^2 |z|^(alpha-1)` vanishing to order `m` at `z0`.
#[derive(Debug, Clone, Deserialize)]
pub struct MultiplicityParams {
    pub alpha: f64,
    pub m: u32,
    pub phi: MapSpec,
    pub z0: Cx,
}

/// A curve generator with its parameters.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case")]
pub enum CurveGen {
    /// `(c, z)`
    Fiber { c: Cx },
    /// `(c, h(z))`
    HolomorphicGraph { h: MapSpec, c: Cx },
    ZeroBranch { m: u32, phi: MapSpec, k: MapSpec, z0: Cx },
    NonvanishingBranch { k: MapSpec, c: MapSpec, z0: Cx, zeta0: Cx },
    /// `(V(k(z)) + c(z), k(z))`
    Counterexample {
        #[serde(default)]
        k_max: Option<u32>,
        #[serde(default = "zero_map")]
        c: MapSpec,
        #[serde(default = "identity_map")]
        k: MapSpec,
    },
}

fn zero_map() -> MapSpec {
    MapSpec::Constant { c: [0.0, 0.0] }
}

fn identity_map() -> MapSpec {
    MapSpec::Identity
}

#[derive(Debug, Clone, Deserialize)]
pub struct CurveSpec {
    #[serde(flatten)]
    pub generator: CurveGen,
    /// Replace the second component `k` by `conj(k)`.
    #[serde(default)]
    pub conjugate_k: bool,
}

fn counterexample_params(k_max: Option<u32>) -> Result<CounterexampleParams> {
    Ok(match k_max {
        Some(k) => CounterexampleParams::new(k)?,
        None => CounterexampleParams::default(),
    })
}

impl CurveSpec {
    pub fn build(&self) -> Result<CurveParam> {
        let curve = match &self.generator {
            CurveGen::Fiber { c } => CurveParam::fiber(cx(*c)),
            CurveGen::HolomorphicGraph { h, c } => CurveParam::holomorphic_graph(h.build(), cx(*c)),
            CurveGen::ZeroBranch { m, phi, k, z0 } => zero_branch_curve(*m, phi.build(), k.build(), cx(*z0))?,
            CurveGen::NonvanishingBranch { k, c, z0, zeta0 } => {
                nonvanishing_branch_curve(k.build(), c.build(), cx(*z0), cx(*zeta0))?
            }
            CurveGen::Counterexample { k_max, c, k } => {
                counterexample_curve(counterexample_params(*k_max)?, c.build(), k.build())
            }
        };
        Ok(if self.conjugate_k { curve.conjugate_k() } else { curve })
    }
}

/// An almost complex structure in normal coordinates.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StructureSpec {
    Standard,
    /// `β2 = ζ^2 conj(w)`
    Quadratic,
    /// `β2 = dV/dwbar(w)`
    Counterexample {
        #[serde(default)]
        k_max: Option<u32>,
    },
    /// Constant `β2`, `β1 = 0`.
    FiberedConstant { beta2: Cx },
}

impl StructureSpec {
    pub fn build(&self) -> Result<AlmostComplexStructure> {
        Ok(match self {
            Self::Standard => fibered_j(|_, _| C64::default(), Regularity::Smooth),
            Self::Quadratic => quadratic_structure(),
            Self::Counterexample { k_max } => counterexample_structure(counterexample_params(*k_max)?),
            Self::FiberedConstant { beta2 } => {
                let b = cx(*beta2);
                fibered_j(move |_, _| b, Regularity::Smooth)
            }
        })
    }
}
