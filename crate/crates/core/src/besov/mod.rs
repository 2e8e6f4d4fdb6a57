//! Structure functions `‖D^h m‖_{L^q(U ∩ (U-h))}` and the `B^{1/3}_{q,∞}` seminorm.

use crate::error::{Error, Result};
use crate::gridcore::{AngleField, Grid2, Mask};
use crate::quad::pairwise_sum;
use rayon::prelude::*;
use serde::Serialize;
use std::fmt::Write as _;

/// Dyadic lengths `2^{-k} L`.
#[derive(Debug, Clone, PartialEq)]
pub struct HLadder {
    pub lengths: Vec<f64>,
}

impl HLadder {
    /// `2^{-k} L` for `k ∈ [k_min, k_max]`.
    pub fn dyadic(l: f64, k_min: u32, k_max: u32) -> Result<Self> {
        if !(l > 0.0) || k_max < k_min {
            return Err(Error::InvalidArgument("ladder needs L > 0 and k_min <= k_max".into()));
        }
        Ok(Self { lengths: (k_min..=k_max).map(|k| l / f64::from(1u32 << k)).collect() })
    }

    /// Default ladder `k = 2..7` relative to the longer side of the bounding box of `U`.
    pub fn default_for(grid: &Grid2, u: &Mask) -> Result<Self> {
        let (mut lo, mut hi) = ([usize::MAX; 2], [0usize; 2]);
        for k in (0..grid.len()).filter(|&k| u.get(k)) {
            let (i, j) = grid.ij(k);
            lo = [lo[0].min(i), lo[1].min(j)];
            hi = [hi[0].max(i), hi[1].max(j)];
        }
        if lo[0] == usize::MAX {
            return Err(Error::EmptyRegion("U".into()));
        }
        let l = ((hi[0] - lo[0] + 1) as f64 * grid.hx).max((hi[1] - lo[1] + 1) as f64 * grid.hy);
        Self::dyadic(l, 2, 7)
    }
}

/// Compass directions, counterclockwise from `e₁`.
pub const DIRECTIONS: [(i64, i64); 8] = [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StructureSample {
    pub direction: usize,
    /// `|h|` of the cell offset actually used
    pub h: f64,
    pub norm: f64,
    /// `|h|^{-1/3} ‖D^h m‖_q`
    pub scaled_norm: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StructureReport {
    pub q: f64,
    pub samples: Vec<StructureSample>,
    /// Mean of the per-direction least-squares slopes.
    pub slope: f64,
    pub direction_slopes: Vec<f64>,
    /// RMS residual of the per-direction fits.
    pub residual: f64,
    /// `max |h|^{-1/3} ‖D^h m‖_q`
    pub seminorm: f64,
}

impl StructureReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("direction,h,norm,scaled_norm\n");
        for x in &self.samples {
            let _ = writeln!(s, "{},{:e},{:e},{:e}", x.direction, x.h, x.norm, x.scaled_norm);
        }
        let _ = writeln!(s, "# slope={:.6} residual={:.3e} seminorm={:.6e}", self.slope, self.residual, self.seminorm);
        s
    }

    /// Running seminorm `max_{|h| >= 2^{-k}L}` per ladder rung, raised to the power q.
    pub fn running_seminorm_pow(&self) -> Vec<f64> {
        let n_rungs = self.samples.iter().filter(|s| s.direction == 0).count();
        let mut out = Vec::with_capacity(n_rungs);
        let mut best: f64 = 0.0;
        for r in 0..n_rungs {
            for s in self.samples.iter().skip(r).step_by(n_rungs.max(1)) {
                best = best.max(s.scaled_norm);
            }
            out.push(best.powf(self.q));
        }
        out
    }
}

/// Cell offset approximating `|h|` along a compass direction.
fn offset_for(m: &AngleField, dir: (i64, i64), len: f64) -> (i64, i64) {
    let g = m.grid;
    let (ux, uy) = (dir.0 as f64 * g.hx, dir.1 as f64 * g.hy);
    let n = ((len / ux.hypot(uy)).round() as i64).max(1);
    (dir.0 * n, dir.1 * n)
}

/// `‖D^h m‖_{L^q(U ∩ (U-h))}` for a cell offset `h`.
pub fn structure_norm(m: &AngleField, q: f64, u: &Mask, di: i64, dj: i64) -> Result<f64> {
    let g = m.grid;
    let region = u.and(&m.mask).shift_intersect(di, dj).and(&m.mask.shift_intersect(di, dj));
    if region.count() == 0 {
        return Err(Error::EmptyRegion(format!("U ∩ (U - h) for h = ({di}, {dj}) cells")));
    }
    let vals: Vec<f64> = (0..g.len())
        .filter(|&k| region.get(k))
        .map(|k| {
            let (i, j) = g.ij(k);
            let t = g.idx((i as i64 + di) as usize, (j as i64 + dj) as usize);
            let (a, b) = (m.m(k), m.m(t));
            (b[0] - a[0]).hypot(b[1] - a[1]).powf(q)
        })
        .collect();
    Ok((pairwise_sum(&vals) * g.cell_area()).powf(1.0 / q))
}

fn fit_slope(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let ss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - my - slope * (x - mx)).powi(2)).sum();
    (slope, ss)
}

/// Structure report for the exponent `q` over 8 directions.
pub fn structure_report(m: &AngleField, q: f64, u: &Mask, ladder: &HLadder) -> Result<StructureReport> {
    if !(q >= 1.0) {
        return Err(Error::InvalidArgument(format!("exponent q = {q} < 1")));
    }
    if ladder.lengths.windows(2).any(|w| !(w[1] < w[0])) || ladder.lengths.is_empty() {
        return Err(Error::InvalidArgument("ladder lengths must strictly decrease".into()));
    }
    let g = m.grid;
    let jobs: Vec<(usize, f64)> = (0..DIRECTIONS.len())
        .flat_map(|d| ladder.lengths.iter().map(move |&l| (d, l)))
        .collect();
    let samples: Vec<StructureSample> = jobs
        .par_iter()
        .map(|&(d, l)| {
            let (di, dj) = offset_for(m, DIRECTIONS[d], l);
            let h = (di as f64 * g.hx).hypot(dj as f64 * g.hy);
            let norm = structure_norm(m, q, u, di, dj)?;
            Ok(StructureSample { direction: d, h, norm, scaled_norm: norm / h.cbrt() })
        })
        .collect::<Result<_>>()?;
    let n = ladder.lengths.len();
    let mut direction_slopes = Vec::with_capacity(DIRECTIONS.len());
    let mut ss_total = 0.0;
    let mut degenerate = true;
    for d in 0..DIRECTIONS.len() {
        let ss: Vec<&StructureSample> = samples[d * n..(d + 1) * n].iter().collect();
        if ss.iter().any(|s| s.norm > 0.0) {
            degenerate = false;
        }
        if n >= 2 && ss.iter().all(|s| s.norm > 0.0) {
            let xs: Vec<f64> = ss.iter().map(|s| s.h.ln()).collect();
            let ys: Vec<f64> = ss.iter().map(|s| s.norm.ln()).collect();
            let (slope, res) = fit_slope(&xs, &ys);
            direction_slopes.push(slope);
            ss_total += res;
        } else {
            direction_slopes.push(f64::NAN);
        }
    }
    let seminorm = samples.iter().map(|s| s.scaled_norm).fold(0.0, f64::max);
    let finite: Vec<f64> = direction_slopes.iter().copied().filter(|s| s.is_finite()).collect();
    let slope = if degenerate || finite.is_empty() {
        f64::NAN
    } else {
        finite.iter().sum::<f64>() / finite.len() as f64
    };
    Ok(StructureReport {
        q,
        samples,
        slope,
        direction_slopes,
        residual: (ss_total / (DIRECTIONS.len() * n) as f64).sqrt(),
        seminorm,
    })
}

/// `B^{1/3}_{3p,∞}` seminorm estimate on `U`.
pub fn besov_seminorm(m: &AngleField, p: f64, u: &Mask, ladder: &HLadder) -> Result<StructureReport> {
    if !(p >= 1.0) {
        return Err(Error::InvalidArgument(format!("exponent p = {p} < 1")));
    }
    structure_report(m, 3.0 * p, u, ladder)
}

/// Direction-averaged slope of `log ‖D^h m‖_q` against `log |h|`.
pub fn structure_exponent(m: &AngleField, q: f64, u: &Mask, ladder: &HLadder) -> Result<(f64, f64)> {
    if ladder.lengths.len() < 4 {
        return Err(Error::InvalidArgument("structure exponent needs at least 4 ladder rungs".into()));
    }
    let r = structure_report(m, q, u, ladder)?;
    if !r.slope.is_finite() {
        return Err(Error::Degenerate("structure norms vanish".into()));
    }
    Ok((r.slope, r.residual))
}
