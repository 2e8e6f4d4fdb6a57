//! The EKF1 ASCII field format.
//!
//! ```text
//! EKLAB-FIELD 1
//! <kind> nx ny x0 y0 hx hy
//! <row j = 0: nx values (2·nx for vector2, components interleaved)>
//! ...
//! ```
//!
//! Values are written with 17 significant digits so that reading returns the
//! exact same bits. Masked cells are written as `nan`.

use crate::error::{Error, Result};
use crate::gridcore::{AngleField, Grid2, Mask, ScalarField, VectorField2};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

pub const MAGIC: &str = "EKLAB-FIELD";
pub const VERSION: u32 = 1;

/// Any field the format can hold.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldData {
    Angle(AngleField),
    Scalar(ScalarField),
    Vector(VectorField2),
}

impl FieldData {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Angle(_) => "angle",
            Self::Scalar(_) => "scalar",
            Self::Vector(_) => "vector2",
        }
    }

    pub fn grid(&self) -> &Grid2 {
        match self {
            Self::Angle(f) => &f.grid,
            Self::Scalar(f) => &f.grid,
            Self::Vector(f) => &f.grid,
        }
    }
}

/// 17-significant-digit representation; `nan` for masked cells.
pub fn fmt_value(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.16e}")
    }
}

pub fn parse_value(tok: &str) -> Result<f64> {
    if tok == "nan" {
        return Ok(f64::NAN);
    }
    tok.parse::<f64>()
        .map_err(|_| Error::Format(format!("bad number `{tok}`")))
}

pub(crate) fn write_header<W: Write>(
    w: &mut W,
    kind: &str,
    g: &Grid2,
    extra: &[usize],
) -> Result<()> {
    writeln!(w, "{MAGIC} {VERSION}")?;
    write!(
        w,
        "{kind} {} {} {} {} {} {}",
        g.nx,
        g.ny,
        fmt_value(g.x0),
        fmt_value(g.y0),
        fmt_value(g.hx),
        fmt_value(g.hy)
    )?;
    for e in extra {
        write!(w, " {e}")?;
    }
    writeln!(w)?;
    Ok(())
}

pub(crate) fn write_rows<W: Write>(w: &mut W, g: &Grid2, comps: &[&[f64]]) -> Result<()> {
    let mut line = String::new();
    for j in 0..g.ny {
        line.clear();
        for i in 0..g.nx {
            let k = g.idx(i, j);
            for c in comps {
                if !line.is_empty() {
                    line.push(' ');
                }
                line.push_str(&fmt_value(c[k]));
            }
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

/// Parsed header: kind, grid, and trailing integer fields.
pub(crate) fn read_header<R: BufRead>(
    lines: &mut std::io::Lines<R>,
) -> Result<(String, Grid2, Vec<usize>)> {
    let first = lines
        .next()
        .ok_or_else(|| Error::Format("empty input".into()))??;
    let mut parts = first.split_whitespace();
    if parts.next() != Some(MAGIC) {
        return Err(Error::Format(format!("bad magic line `{first}`")));
    }
    let version = parts
        .next()
        .ok_or_else(|| Error::Format("missing version".into()))?;
    if version != VERSION.to_string() {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let second = lines
        .next()
        .ok_or_else(|| Error::Format("missing header".into()))??;
    let toks: Vec<&str> = second.split_whitespace().collect();
    if toks.len() < 7 {
        return Err(Error::Format(format!("short header `{second}`")));
    }
    let nx: usize = toks[1]
        .parse()
        .map_err(|_| Error::Format("bad nx".into()))?;
    let ny: usize = toks[2]
        .parse()
        .map_err(|_| Error::Format("bad ny".into()))?;
    let nums: Vec<f64> = toks[3..7]
        .iter()
        .map(|t| parse_value(t))
        .collect::<Result<_>>()?;
    let grid = Grid2::new(nx, ny, nums[0], nums[1], nums[2], nums[3])
        .map_err(|e| Error::Format(e.to_string()))?;
    let extra = toks[7..]
        .iter()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| Error::Format(format!("bad header field `{t}`")))
        })
        .collect::<Result<_>>()?;
    Ok((toks[0].to_string(), grid, extra))
}

/// Reads `g.ny` rows of `ncomp·g.nx` values into per-component arrays.
pub(crate) fn read_rows<R: BufRead>(
    lines: &mut std::io::Lines<R>,
    g: &Grid2,
    ncomp: usize,
) -> Result<Vec<Vec<f64>>> {
    let mut comps = vec![vec![0.0; g.len()]; ncomp];
    for j in 0..g.ny {
        let line = lines
            .next()
            .ok_or_else(|| Error::Format(format!("missing row {j}")))??;
        let vals: Vec<f64> = line
            .split_whitespace()
            .map(parse_value)
            .collect::<Result<_>>()?;
        if !vals.len().is_multiple_of(ncomp) {
            return Err(Error::Format(format!(
                "row {j}: {} values not a multiple of {ncomp}",
                vals.len()
            )));
        }
        if vals.len() != ncomp * g.nx {
            return Err(Error::Format(format!(
                "row {j}: expected {} values, got {}",
                ncomp * g.nx,
                vals.len()
            )));
        }
        for i in 0..g.nx {
            for (c, comp) in comps.iter_mut().enumerate() {
                comp[g.idx(i, j)] = vals[ncomp * i + c];
            }
        }
    }
    Ok(comps)
}

fn mask_from(values: &[f64], g: &Grid2) -> Result<Mask> {
    let mut m = Mask::empty(g);
    for (k, v) in values.iter().enumerate() {
        if v.is_nan() {
            continue;
        }
        if !v.is_finite() {
            return Err(Error::Format(format!("non-finite value at cell {k}")));
        }
        m.cells[k] = true;
    }
    Ok(m)
}

pub fn write_field<W: Write>(w: &mut W, field: &FieldData) -> Result<()> {
    write_header(w, field.kind(), field.grid(), &[])?;
    match field {
        FieldData::Angle(f) => write_rows(w, &f.grid, &[&f.theta]),
        FieldData::Scalar(f) => write_rows(w, &f.grid, &[&f.values]),
        FieldData::Vector(f) => write_rows(w, &f.grid, &[&f.u, &f.v]),
    }
}

pub fn read_field<R: BufRead>(r: R) -> Result<FieldData> {
    let mut lines = r.lines();
    let (kind, g, extra) = read_header(&mut lines)?;
    if !extra.is_empty() {
        return Err(Error::Format(format!(
            "unexpected header fields for kind `{kind}`"
        )));
    }
    let field = match kind.as_str() {
        "angle" => {
            let c = read_rows(&mut lines, &g, 1)?;
            let mask = mask_from(&c[0], &g)?;
            let theta = c.into_iter().next().unwrap();
            FieldData::Angle(AngleField {
                grid: g,
                mask,
                theta,
                singular_points: Vec::new(),
            })
        }
        "scalar" => {
            let c = read_rows(&mut lines, &g, 1)?;
            let mask = mask_from(&c[0], &g)?;
            FieldData::Scalar(ScalarField {
                grid: g,
                mask,
                values: c.into_iter().next().unwrap(),
            })
        }
        "vector2" => {
            let mut c = read_rows(&mut lines, &g, 2)?;
            let mask = mask_from(&c[0], &g)?;
            if mask != mask_from(&c[1], &g)? {
                return Err(Error::Format(
                    "vector components disagree on the mask".into(),
                ));
            }
            let v = c.pop().unwrap();
            let u = c.pop().unwrap();
            FieldData::Vector(VectorField2 {
                grid: g,
                mask,
                u,
                v,
            })
        }
        other => return Err(Error::Format(format!("unknown kind `{other}`"))),
    };
    if let Some(extra_line) = lines.next() {
        if !extra_line?.trim().is_empty() {
            return Err(Error::Format("trailing data after the last row".into()));
        }
    }
    Ok(field)
}

pub fn save_field(path: impl AsRef<Path>, field: &FieldData) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    write_field(&mut w, field)?;
    w.flush()?;
    Ok(())
}

pub fn load_field(path: impl AsRef<Path>) -> Result<FieldData> {
    read_field(BufReader::new(std::fs::File::open(path)?))
}
