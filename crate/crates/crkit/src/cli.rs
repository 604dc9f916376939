//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or domain error, 2 tolerance failure.
//! Unless `--tol` is given, a gated residual is compared with a default
//! threshold of `10 h^p`, where `h` is the grid spacing and `p` the
//! convergence order expected for the check.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use crkit_core::almost_complex::{eigenframe, j_matrix_from_beta, jholo_residual_field, q_matrix, RealMatrix};
use crkit_core::counterexample::{big_v, blowup_sequence, blowup_value, bound_b2, CounterexampleParams};
use crkit_core::grid::{cr_residual_field, green_check, holder_estimate, Bounds};
use crkit_core::separable::{
    multiplicity_rhs, solve_multiplicity_example, solve_nonvanishing, solve_simple_zero, verify_implicit_formula,
    SolutionHandle,
};
use crkit_core::series::{normal_form_h, verify_normal_form};
use crkit_core::transforms::{beurling_transform_with, cauchy_transform_with, subdivide, verify_transform_identities_with};
use crkit_core::{GridFunction, ResidualReport, C64};
use serde_json::{json, Value};

use crate::cgrid;
use crate::parallel::Rayon;
use crate::plot::{plot, Style};
use crate::report::{complex, residual, series, Report, SeriesJson};
use crate::specs::{
    cx, load_json, parse_complex, parse_grid, parse_k_range, CurveSpec, MultiplicityParams, NonvanishingParams,
    SimpleZeroParams, StructureSpec,
};

#[derive(Debug, Parser)]
#[command(name = "crkit", version, about = "Nonlinear Cauchy-Riemann toolkit")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Seed for every randomised step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Override the tolerance of the command's gate.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Directory that relative output paths are resolved against.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cauchy or Beurling transform of a CGRID density.
    Transform {
        #[arg(value_enum)]
        kind: TransformKind,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Subdivide each source cell into k x k subcells.
        #[arg(long, default_value_t = 1)]
        refine: usize,
    },
    /// Formal power series tools.
    Series {
        #[command(subcommand)]
        op: SeriesOp,
    },
    /// Build a solution of a separable equation and check its residual.
    Solve {
        #[arg(value_enum)]
        family: SolveFamily,
        /// Parameter JSON (inline or file).
        #[arg(long)]
        params: String,
        /// `re,im,h,nx,ny`
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        /// Report path (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the sampled solution as CGRID.
        #[arg(long)]
        samples: Option<PathBuf>,
        /// Also write the residual field as CGRID.
        #[arg(long)]
        residual_out: Option<PathBuf>,
    },
    Verify {
        #[command(subcommand)]
        op: VerifyOp,
    },
    /// The continuous structure coefficient V.
    Counterexample {
        #[command(subcommand)]
        op: CounterexampleOp,
    },
    /// Almost complex structures and J-holomorphic curves.
    Acs {
        #[command(subcommand)]
        op: AcsOp,
    },
    /// Rectangle Green identity for a CGRID field.
    GreenCheck {
        #[arg(long = "in")]
        input: PathBuf,
        /// `x0,y0,x1,y1` in the plane.
        #[arg(long, allow_hyphen_values = true)]
        rect: String,
    },
    /// Seeded Hölder exponent estimate for a CGRID field.
    Holder {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 4000)]
        pairs: usize,
    },
    /// SVG heatmap or quiver plot of a CGRID field.
    Plot {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Style::Heatmap)]
        style: Style,
        #[arg(long)]
        title: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TransformKind {
    Cauchy,
    Beurling,
}

#[derive(Debug, Subcommand)]
pub enum SeriesOp {
    /// Normal-form map of a series with a simple zero at its center.
    NormalForm {
        /// Series JSON (inline or file).
        #[arg(long)]
        coeffs: String,
        #[arg(long, default_value_t = crkit_core::series::DEFAULT_ORDER)]
        order: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolveFamily {
    Nonvanishing,
    SimpleZero,
    Multiplicity,
}

#[derive(Debug, Subcommand)]
pub enum VerifyOp {
    /// dbar(C(P)) = P and S(P) = dz(C(P)) for a CGRID density.
    Transforms {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Recover phi = (z-z0)^M (F(u) - G) from CGRID samples of u.
    Implicit {
        #[arg(long = "in")]
        input: PathBuf,
        /// Map JSON for F.
        #[arg(long)]
        big_f: String,
        /// Antiderivative JSON for G.
        #[arg(long)]
        g: String,
        #[arg(long, allow_hyphen_values = true)]
        z0: String,
        #[arg(long)]
        m: Option<u32>,
    },
}

#[derive(Debug, Subcommand)]
pub enum CounterexampleOp {
    Eval {
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long)]
        k_max: Option<u32>,
    },
    /// dV/dz at the blow-up points; `--k 3` or `--k 1..5`.
    Blowup {
        #[arg(long)]
        k: String,
        #[arg(long)]
        k_max: Option<u32>,
    },
    /// CGRID samples of V, dV/dz and dV/dzbar (`<out>`, `<stem>.dz.<ext>`, `<stem>.dbar.<ext>`).
    Sample {
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        k_max: Option<u32>,
    },
}

#[derive(Debug, Subcommand)]
pub enum AcsOp {
    /// J, its eigenframe and Q at constant (β1, β2).
    Matrix {
        #[arg(long, allow_hyphen_values = true)]
        beta1: String,
        #[arg(long, allow_hyphen_values = true)]
        beta2: String,
    },
    /// J-holomorphy residual of a curve.
    Verify {
        /// Curve JSON naming a generator (inline or file).
        #[arg(long)]
        curve: String,
        /// Structure JSON (inline or file).
        #[arg(long)]
        structure: String,
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Threshold `10 h^order`.
pub fn default_tolerance(h: f64, order: u32) -> f64 {
    10.0 * h.powi(order as i32)
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(reports) => {
            let failed: Vec<&Report> = reports.iter().filter(|r| r.failed()).collect();
            for r in &failed {
                eprintln!("crkit: {} exceeded tolerance {:e}", r.command, r.tolerance.unwrap_or(f64::NAN));
            }
            if failed.is_empty() {
                0
            } else {
                2
            }
        }
        Err(e) => {
            eprintln!("crkit: error: {e:#}");
            1
        }
    }
}

struct Ctx<'a> {
    global: &'a Global,
}

impl Ctx<'_> {
    fn path(&self, p: &Path) -> Result<PathBuf> {
        let full = match &self.global.out_dir {
            Some(dir) if p.is_relative() => dir.join(p),
            _ => p.to_path_buf(),
        };
        if let Some(parent) = full.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
        }
        Ok(full)
    }

    fn tol(&self, default: f64) -> f64 {
        self.global.tol.unwrap_or(default)
    }

    fn render(&self, r: &Report) -> String {
        match self.global.format {
            Format::Json => r.to_json(),
            Format::Csv => r.to_csv(),
        }
    }

    /// Writes the report to `out` (resolved) or stdout.
    fn emit(&self, r: Report, out: Option<&Path>) -> Result<Vec<Report>> {
        self.emit_text(&self.render(&r), out)?;
        Ok(vec![r])
    }

    fn emit_text(&self, text: &str, out: Option<&Path>) -> Result<()> {
        match out {
            Some(p) => {
                let p = self.path(p)?;
                fs::write(&p, text).with_context(|| format!("writing {}", p.display()))
            }
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    fn load_grid(&self, p: &Path) -> Result<GridFunction> {
        cgrid::load(p).with_context(|| format!("reading {}", p.display()))
    }

    fn save_grid(&self, p: &Path, g: &GridFunction) -> Result<PathBuf> {
        let full = self.path(p)?;
        cgrid::save(&full, g).with_context(|| format!("writing {}", full.display()))?;
        Ok(full)
    }
}

fn execute(cli: &Cli) -> Result<Vec<Report>> {
    let ctx = Ctx { global: &cli.global };
    match &cli.command {
        Command::Transform { kind, input, out, refine } => transform(&ctx, *kind, input, out, *refine),
        Command::Series { op: SeriesOp::NormalForm { coeffs, order } } => normal_form(&ctx, coeffs, *order),
        Command::Solve { family, params, grid, out, samples, residual_out } => {
            solve(&ctx, *family, params, grid, out.as_deref(), samples.as_deref(), residual_out.as_deref())
        }
        Command::Verify { op: VerifyOp::Transforms { input } } => verify_transforms(&ctx, input),
        Command::Verify { op: VerifyOp::Implicit { input, big_f, g, z0, m } } => {
            verify_implicit(&ctx, input, big_f, g, z0, *m)
        }
        Command::Counterexample { op } => counterexample(&ctx, op),
        Command::Acs { op: AcsOp::Matrix { beta1, beta2 } } => acs_matrix(&ctx, beta1, beta2),
        Command::Acs { op: AcsOp::Verify { curve, structure, grid, out } } => {
            acs_verify(&ctx, curve, structure, grid, out.as_deref())
        }
        Command::GreenCheck { input, rect } => green(&ctx, input, rect),
        Command::Holder { input, pairs } => holder(&ctx, input, *pairs),
        Command::Plot { input, out, style, title } => {
            let g = ctx.load_grid(input)?;
            let title = title.clone().unwrap_or_else(|| input.display().to_string());
            let svg = plot(&g, *style, &title)?;
            let path = ctx.path(out)?;
            fs::write(&path, svg).with_context(|| format!("writing {}", path.display()))?;
            ctx.emit(Report::new("plot", json!({ "svg": path.display().to_string() })), None)
        }
    }
}

fn transform(ctx: &Ctx, kind: TransformKind, input: &Path, out: &Path, refine: usize) -> Result<Vec<Report>> {
    let p = ctx.load_grid(input)?;
    let exec = Rayon::from_env();
    let source = if refine > 1 { subdivide(&p, refine)? } else { p.clone() };
    let target = Some(*p.geometry());
    let res = match kind {
        TransformKind::Cauchy => cauchy_transform_with(&source, target, &exec)?,
        TransformKind::Beurling => beurling_transform_with(&source, target, &exec)?,
    };
    let path = ctx.save_grid(out, &res.grid)?;
    let name = match kind {
        TransformKind::Cauchy => "transform cauchy",
        TransformKind::Beurling => "transform beurling",
    };
    ctx.emit(
        Report::new(
            name,
            json!({
                "output": path.display().to_string(),
                "refine": refine,
                "quadrature_cells": res.quadrature_cells,
                "support_min": complex(res.source_support.min),
                "support_max": complex(res.source_support.max),
            }),
        ),
        None,
    )
}

fn normal_form(ctx: &Ctx, coeffs: &str, order: usize) -> Result<Vec<Report>> {
    let f = load_json::<SeriesJson>(coeffs)?.to_power()?;
    let h = normal_form_h(&f, order)?;
    let res = verify_normal_form(&f, &h, order)?;
    let r = Report::new("series normal-form", json!({ "order": order, "h": series(&h), "residual": res }))
        .gated(res, ctx.tol(1e-10));
    ctx.emit(r, None)
}

fn solve(
    ctx: &Ctx,
    family: SolveFamily,
    params: &str,
    grid: &str,
    out: Option<&Path>,
    samples: Option<&Path>,
    residual_out: Option<&Path>,
) -> Result<Vec<Report>> {
    let geom = parse_grid(grid)?;
    type Rhs = Box<dyn Fn(C64, C64) -> Option<C64>>;
    let (name, sol, rhs): (&str, SolutionHandle, Rhs) = match family {
        SolveFamily::Nonvanishing => {
            let p: NonvanishingParams = load_json(params)?;
            let big_f = p.big_f.build();
            let sol = solve_nonvanishing(big_f.clone(), p.g.big_g(), cx(p.z0), cx(p.w0), p.c.build())?;
            let g = p.g.small_g();
            ("solve nonvanishing", sol, Box::new(move |z, u| Some(g(z) / big_f.derivative(u).ok()?)))
        }
        SolveFamily::SimpleZero => {
            let p: SimpleZeroParams = load_json(params)?;
            let f = p.f.to_power()?;
            let w0 = f.center;
            let sol = solve_simple_zero(&f, p.g.big_g(), cx(p.z0), w0, p.b.build(), p.order)?;
            let g = p.g.small_g();
            ("solve simple-zero", sol, Box::new(move |z, u| Some(f.eval(u) * g(z))))
        }
        SolveFamily::Multiplicity => {
            let p: MultiplicityParams = load_json(params)?;
            let alpha = p.alpha;
            let sol = solve_multiplicity_example(alpha, p.m, p.phi.build(), cx(p.z0))?;
            ("solve multiplicity", sol, Box::new(move |z, u| multiplicity_rhs(alpha, z, u)))
        }
    };
    let u = sol.sample(geom)?;
    // nodes where the right-hand side is singular are masked, not failed
    let checked = u.map(|z, v| rhs(z, v).map(|_| v));
    let res_field = cr_residual_field(&checked, rhs)?;
    let report = ResidualReport::of_field(&res_field)?;
    let mut data = json!({
        "z0": complex(sol.z0),
        "w0": complex(sol.w0),
        "masked": geom.len() - u.unmasked_count(),
        "residual": residual(&report),
    });
    if let Some(s) = samples {
        data["samples"] = Value::from(ctx.save_grid(s, &u)?.display().to_string());
    }
    if let Some(p) = residual_out {
        data["residual_field"] = Value::from(ctx.save_grid(p, &res_field)?.display().to_string());
    }
    let r = Report::new(name, data).gated(report.max_abs, ctx.tol(default_tolerance(geom.spacing, 2)));
    ctx.emit(r, out)
}

fn verify_transforms(ctx: &Ctx, input: &Path) -> Result<Vec<Report>> {
    let p = ctx.load_grid(input)?;
    let (r1, r2) = verify_transform_identities_with(&p, &Rayon::from_env())?;
    let worst = r1.max_abs.max(r2.max_abs);
    let r = Report::new("verify transforms", json!({ "dbar_cauchy": residual(&r1), "beurling_vs_dz": residual(&r2) }))
        .gated(worst, ctx.tol(default_tolerance(p.geometry().spacing, 1)));
    ctx.emit(r, None)
}

fn verify_implicit(ctx: &Ctx, input: &Path, big_f: &str, g: &str, z0: &str, m: Option<u32>) -> Result<Vec<Report>> {
    let u = ctx.load_grid(input)?;
    let big_f = load_json::<crate::specs::MapSpec>(big_f)?.build();
    let big_g = load_json::<crate::specs::GSpec>(g)?.big_g();
    let z0 = parse_complex(z0)?;
    let check = verify_implicit_formula(&u, &big_f, |z| big_g(z), z0, m)?;
    let r = Report::new(
        "verify implicit",
        json!({
            "m": check.m,
            "candidates": check.candidates,
            "phi_at_z0": complex(check.phi_at_z0),
            "residual": residual(&check.report),
        }),
    )
    .gated(check.report.max_abs, ctx.tol(default_tolerance(u.geometry().spacing, 2)));
    ctx.emit(r, None)
}

fn params(k_max: Option<u32>) -> Result<CounterexampleParams> {
    Ok(match k_max {
        Some(k) => CounterexampleParams::new(k)?,
        None => CounterexampleParams::default(),
    })
}

fn counterexample(ctx: &Ctx, op: &CounterexampleOp) -> Result<Vec<Report>> {
    match op {
        CounterexampleOp::Eval { z, k_max } => {
            let p = params(*k_max)?;
            let z = parse_complex(z)?;
            let v = big_v(&p, z);
            let r = Report::new(
                "counterexample eval",
                json!({
                    "z": complex(z),
                    "value": complex(v.jet.value),
                    "dz": complex(v.jet.dz),
                    "dbar": complex(v.jet.dbar),
                    "disk": v.disk,
                    "truncated": v.truncated,
                    "bound_b2": bound_b2(),
                }),
            );
            ctx.emit(r, None)
        }
        CounterexampleOp::Blowup { k, k_max } => {
            let ks = parse_k_range(k)?;
            let p = match k_max {
                Some(_) => params(*k_max)?,
                None => params(Some(ks.iter().copied().max().unwrap_or(1).max(CounterexampleParams::default().k_max)))?,
            };
            let mut rows = Vec::new();
            let mut worst = 0.0f64;
            for &k in &ks {
                let b = blowup_sequence(&p, k)?;
                let expected = blowup_value(k);
                let rel = (b.dz - expected).norm() / expected;
                worst = worst.max(rel);
                rows.push(json!({
                    "k": k,
                    "z": complex(b.z),
                    "local_log_modulus": b.local_log_modulus,
                    "dzV": complex(b.dz),
                    "dbarV": complex(b.dbar),
                    "closed_form": expected,
                    "rel_err": rel,
                }));
            }
            let r = Report::new("counterexample blowup", json!({ "points": rows })).gated(worst, ctx.tol(1e-9));
            match ctx.global.format {
                Format::Json => ctx.emit(r, None),
                Format::Csv => {
                    ctx.emit_text(&blowup_csv(&p, &ks)?, None)?;
                    Ok(vec![r])
                }
            }
        }
        CounterexampleOp::Sample { grid, out, k_max } => {
            let p = params(*k_max)?;
            let geom = parse_grid(grid)?;
            let jets: Vec<_> = (0..geom.len()).map(|k| big_v(&p, geom.point_at(k)).jet).collect();
            let field = |f: &dyn Fn(usize) -> C64| GridFunction::new(geom, (0..geom.len()).map(f).collect(), None);
            let outputs = [
                (out.clone(), field(&|k| jets[k].value)?),
                (sibling(out, "dz"), field(&|k| jets[k].dz)?),
                (sibling(out, "dbar"), field(&|k| jets[k].dbar)?),
            ];
            let mut written = Vec::new();
            for (path, g) in &outputs {
                written.push(ctx.save_grid(path, g)?.display().to_string());
            }
            ctx.emit(Report::new("counterexample sample", json!({ "outputs": written })), None)
        }
    }
}

/// `dir/stem.tag.ext` next to `path`.
fn sibling(path: &Path, tag: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}.{tag}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{tag}"),
    };
    path.with_file_name(name)
}

fn blowup_csv(p: &CounterexampleParams, ks: &[u32]) -> Result<String> {
    let f = cgrid::fmt_f64;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "k", "z_re", "z_im", "local_log_modulus", "dzV", "dzV_im", "dbarV_re", "dbarV_im", "closed_form", "rel_err",
    ])?;
    for &k in ks {
        let b = blowup_sequence(p, k)?;
        let expected = blowup_value(k);
        w.write_record([
            k.to_string(),
            f(b.z.re),
            f(b.z.im),
            f(b.local_log_modulus),
            f(b.dz.re),
            f(b.dz.im),
            f(b.dbar.re),
            f(b.dbar.im),
            f(expected),
            f((b.dz - expected).norm() / expected),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn real_matrix(m: &RealMatrix) -> Value {
    Value::from((0..4).map(|i| (0..4).map(|j| Value::from(m[(i, j)])).collect::<Vec<_>>()).collect::<Vec<_>>())
}

fn acs_matrix(ctx: &Ctx, beta1: &str, beta2: &str) -> Result<Vec<Report>> {
    let (b1, b2) = (parse_complex(beta1)?, parse_complex(beta2)?);
    let j = j_matrix_from_beta(b1, b2)?;
    let frame = eigenframe(b1, b2)?;
    let square = (j * j + RealMatrix::identity()).abs().max();
    let recon = (frame.reconstruct() - j.map(C64::from)).map(|z| z.norm()).max();
    let q = q_matrix(b1, b2);
    let r = Report::new(
        "acs matrix",
        json!({
            "j": real_matrix(&j),
            "j_squared_plus_id": square,
            "eigen_reconstruction": recon,
            "q": [[complex(q[(0, 0)]), complex(q[(0, 1)])], [complex(q[(1, 0)]), complex(q[(1, 1)])]],
        }),
    )
    .gated(square.max(recon), ctx.tol(1e-10));
    ctx.emit(r, None)
}

fn acs_verify(ctx: &Ctx, curve: &str, structure: &str, grid: &str, out: Option<&Path>) -> Result<Vec<Report>> {
    let curve_spec: CurveSpec = load_json(curve)?;
    let structure: StructureSpec = load_json(structure)?;
    let geom = parse_grid(grid)?;
    let acs = structure.build()?;
    let field = jholo_residual_field(&curve_spec.build()?, &acs, geom)?;
    let report = ResidualReport::of_field(&field)?;
    let order = acs.regularity.expected_order();
    let r = Report::new(
        "acs verify",
        json!({
            "regularity": format!("{:?}", acs.regularity).to_lowercase(),
            "expected_order": order,
            "masked": geom.len() - field.unmasked_count(),
            "residual": residual(&report),
        }),
    )
    .gated(report.max_abs, ctx.tol(default_tolerance(geom.spacing, order)));
    ctx.emit(r, out)
}

fn green(ctx: &Ctx, input: &Path, rect: &str) -> Result<Vec<Report>> {
    let g = ctx.load_grid(input)?;
    let c: Vec<f64> = rect.split(',').map(|t| t.trim().parse()).collect::<Result<_, _>>().context("rect")?;
    let [x0, y0, x1, y1] = c.as_slice() else { bail!("rect must be `x0,y0,x1,y1`") };
    let bounds = Bounds::new(C64::new(*x0, *y0), C64::new(*x1, *y1));
    let nodes = g.geometry().nodes_within(bounds).context("rectangle contains no grid nodes")?;
    let chk = green_check(&g, nodes)?;
    let r = Report::new(
        "green-check",
        json!({ "contour": complex(chk.contour), "area": complex(chk.area), "discrepancy": chk.discrepancy }),
    )
    .gated(chk.discrepancy, ctx.tol(default_tolerance(g.geometry().spacing, 2)));
    ctx.emit(r, None)
}

fn holder(ctx: &Ctx, input: &Path, pairs: usize) -> Result<Vec<Report>> {
    let g = ctx.load_grid(input)?;
    let est = holder_estimate(&g, pairs, ctx.global.seed)?;
    ctx.emit(
        Report::new(
            "holder",
            json!({ "alpha": est.alpha, "constant": est.constant, "pairs_used": est.pairs_used, "seed": ctx.global.seed }),
        ),
        None,
    )
}
