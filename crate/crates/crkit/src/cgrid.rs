//! CGRID v1: a header line `CGRID1 nx ny h re(origin) im(origin)` followed
//! by `nx * ny` lines `re im mask` in row-major order.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crkit_core::{c64, GridFunction, GridGeometry, C64};

const MAGIC: &str = "CGRID1";

#[derive(Debug, thiserror::Error)]
pub enum CgridError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Grid(#[from] crkit_core::Error),
}

fn parse_err(line: usize, msg: impl Into<String>) -> CgridError {
    CgridError::Parse { line, msg: msg.into() }
}

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_cgrid<W: Write>(mut w: W, g: &GridFunction) -> io::Result<()> {
    let geom = g.geometry();
    writeln!(
        w,
        "{MAGIC} {} {} {} {} {}",
        geom.nx,
        geom.ny,
        fmt_f64(geom.spacing),
        fmt_f64(geom.origin.re),
        fmt_f64(geom.origin.im)
    )?;
    for (k, v) in g.values().iter().enumerate() {
        writeln!(w, "{} {} {}", fmt_f64(v.re), fmt_f64(v.im), u8::from(g.is_masked_at(k)))?;
    }
    w.flush()
}

fn field<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T, CgridError> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse().map_err(|_| parse_err(line, format!("bad {what} `{tok}`")))
}

pub fn read_cgrid<R: BufRead>(r: R) -> Result<GridFunction, CgridError> {
    let mut lines = r.lines();
    let header = lines.next().ok_or_else(|| parse_err(1, "empty file"))??;
    let mut toks = header.split_whitespace();
    if toks.next() != Some(MAGIC) {
        return Err(parse_err(1, "not a CGRID1 file"));
    }
    let nx: usize = field(toks.next(), 1, "nx")?;
    let ny: usize = field(toks.next(), 1, "ny")?;
    let h: f64 = field(toks.next(), 1, "spacing")?;
    let ore: f64 = field(toks.next(), 1, "origin re")?;
    let oim: f64 = field(toks.next(), 1, "origin im")?;
    if toks.next().is_some() {
        return Err(parse_err(1, "trailing header fields"));
    }
    let geom = GridGeometry::new(c64(ore, oim), h, nx, ny)?;

    let mut values = Vec::with_capacity(geom.len());
    let mut mask = Vec::with_capacity(geom.len());
    for (n, line) in lines.enumerate() {
        let line = line?;
        let lineno = n + 2;
        if line.trim().is_empty() {
            continue;
        }
        if values.len() == geom.len() {
            return Err(parse_err(lineno, "more samples than nx * ny"));
        }
        let mut toks = line.split_whitespace();
        let re: f64 = field(toks.next(), lineno, "re")?;
        let im: f64 = field(toks.next(), lineno, "im")?;
        let m: u8 = field(toks.next(), lineno, "mask")?;
        if m > 1 || toks.next().is_some() {
            return Err(parse_err(lineno, "expected `re im mask` with mask 0 or 1"));
        }
        values.push(C64::new(re, im));
        mask.push(m == 1);
    }
    if values.len() != geom.len() {
        return Err(parse_err(geom.len() + 1, format!("expected {} samples, found {}", geom.len(), values.len())));
    }
    Ok(GridFunction::from_computed(geom, values, Some(mask))?)
}

pub fn save(path: &Path, g: &GridFunction) -> io::Result<()> {
    write_cgrid(BufWriter::new(File::create(path)?), g)
}

pub fn load(path: &Path) -> Result<GridFunction, CgridError> {
    read_cgrid(BufReader::new(File::open(path)?))
}
