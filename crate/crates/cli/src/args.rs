//! Parsers for the compact region and test-function specs taken on the command line.

use eklab_core::{Error, Grid2, Mask, Result, TestFunction};

fn numbers(spec: &str, body: &str, want: usize) -> Result<Vec<f64>> {
    let vals = body
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| Error::Config(format!("`{spec}`: expected {want} comma-separated numbers")))?;
    if vals.len() != want {
        return Err(Error::Config(format!("`{spec}`: expected {want} numbers, got {}", vals.len())));
    }
    Ok(vals)
}

/// Region on a grid: `full`, `disk:cx,cy,r`, `annulus:cx,cy,r1,r2` or `rect:x0,y0,x1,y1`.
pub fn region(spec: &str, grid: &Grid2) -> Result<Mask> {
    let (kind, body) = spec.split_once(':').unwrap_or((spec, ""));
    match kind.trim() {
        "full" => Ok(Mask::full(grid)),
        "disk" => {
            let v = numbers(spec, body, 3)?;
            Ok(Mask::disk(grid, [v[0], v[1]], v[2]))
        }
        "annulus" => {
            let v = numbers(spec, body, 4)?;
            Ok(Mask::annulus(grid, [v[0], v[1]], v[2], v[3]))
        }
        "rect" => {
            let v = numbers(spec, body, 4)?;
            Ok(Mask::rect(grid, [v[0], v[1]], [v[2], v[3]]))
        }
        other => Err(Error::Config(format!("unknown region kind `{other}`"))),
    }
}

/// Spatial test function: `radial:cx,cy,inner,outer`, `ring:cx,cy,r1,r2,ramp`
/// or `tensor:cx,cy,ix,iy,ox,oy`.
pub fn test_function(spec: &str) -> Result<TestFunction> {
    let (kind, body) = spec.split_once(':').unwrap_or((spec, ""));
    match kind.trim() {
        "radial" => {
            let v = numbers(spec, body, 4)?;
            TestFunction::radial([v[0], v[1]], v[2], v[3])
        }
        "ring" => {
            let v = numbers(spec, body, 5)?;
            Ok(TestFunction::RingBump { center: [v[0], v[1]], r1: v[2], r2: v[3], ramp: v[4] })
        }
        "tensor" => {
            let v = numbers(spec, body, 6)?;
            Ok(TestFunction::TensorBump { center: [v[0], v[1]], inner: [v[2], v[3]], outer: [v[4], v[5]] })
        }
        other => Err(Error::Config(format!("unknown test function kind `{other}`"))),
    }
}

/// A pair `x,y`.
pub fn point(spec: &str) -> Result<[f64; 2]> {
    let v = numbers(spec, spec, 2)?;
    Ok([v[0], v[1]])
}
