//! EKF1 stacks: the usual header with a trailing `Ns`, then `Ns` blocks of
//! `ny` rows, one block per s-node.

use super::{KineticData, KineticDensity, KineticField, SGrid};
use crate::error::{Error, Result};
use crate::gridcore::{Grid2, Mask};
use crate::io::{read_header, read_rows, write_header, write_rows};
use std::io::{BufRead, Write};

const FIELD_KIND: &str = "kinetic";
const DENSITY_KIND: &str = "kinetic-density";

#[derive(Debug, Clone)]
pub enum KineticStack {
    Field(KineticField),
    Density(KineticDensity),
}

pub fn write_kinetic<W: Write>(w: &mut W, stack: &KineticStack) -> Result<()> {
    let (kind, s, grid, mask): (&str, SGrid, &Grid2, &Mask) = match stack {
        KineticStack::Field(f) => (FIELD_KIND, f.s, &f.grid, &f.mask),
        KineticStack::Density(d) => match d.s_grid() {
            Some(s) => (DENSITY_KIND, s, d.grid(), d.mask()),
            None => {
                return Err(Error::InvalidArgument(
                    "a parametric density has no sampled stack".into(),
                ))
            }
        },
    };
    write_header(w, kind, grid, &[s.ns])?;
    let mut block = vec![f64::NAN; grid.len()];
    for k in 0..s.ns {
        for (idx, b) in block.iter_mut().enumerate() {
            *b = if !mask.get(idx) {
                f64::NAN
            } else {
                match stack {
                    KineticStack::Field(f) => f.value(k, idx),
                    KineticStack::Density(d) => d.value(k, idx).expect("sampled"),
                }
            };
        }
        write_rows(w, grid, &[&block])?;
    }
    Ok(())
}

pub fn read_kinetic<R: BufRead>(r: R) -> Result<KineticStack> {
    let mut lines = r.lines();
    let (kind, grid, extra) = read_header(&mut lines)?;
    if extra.len() != 1 {
        return Err(Error::Format(
            "kinetic stacks carry exactly one extra header field (Ns)".into(),
        ));
    }
    let s = SGrid::new(extra[0]).map_err(|e| Error::Format(e.to_string()))?;
    let mut values = vec![f64::NAN; s.ns * grid.len()];
    let mut mask = Mask::empty(&grid);
    for k in 0..s.ns {
        let block = read_rows(&mut lines, &grid, 1)?
            .pop()
            .expect("one component");
        for (idx, v) in block.into_iter().enumerate() {
            if k == 0 {
                mask.cells[idx] = !v.is_nan();
            } else if mask.cells[idx] == v.is_nan() {
                return Err(Error::Format(format!(
                    "mask differs between blocks at s-node {k}"
                )));
            }
            values[idx * s.ns + k] = v;
        }
    }
    match kind.as_str() {
        FIELD_KIND => Ok(KineticStack::Field(KineticField {
            s,
            grid,
            mask,
            data: KineticData::Sampled(values),
        })),
        DENSITY_KIND => Ok(KineticStack::Density(KineticDensity::Sampled {
            s,
            grid,
            mask,
            values,
        })),
        other => Err(Error::Format(format!(
            "unexpected kind `{other}` for a kinetic stack"
        ))),
    }
}
