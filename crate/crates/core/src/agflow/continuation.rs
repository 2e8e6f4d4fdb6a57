use super::domain::Domain;
use super::energy::{ag_energy, check_eps, StreamFunction};
use super::minimize::{minimize_stream, MinimizeConfig, StopReason, TraceStep};
use crate::entropy::{entropy_production_vector, Entropy};
use crate::error::Result;
use crate::gridcore::{Grid2, Mask, VectorField2};
use crate::io::fmt_value;
use crate::quad::pairwise_sum;
use std::f64::consts::PI;

/// Energy, entropy total variation, and their ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyComparison {
    pub energy: f64,
    /// `Σ_cells |(div Σ₁(m), div Σ₂(m))| · cell area`.
    pub total_variation: f64,
    /// `total_variation / energy`, zero when both vanish.
    pub ratio: f64,
}

/// Compares `E_ε(m)` with `|div Σ(m)|(R)` through the polynomial extensions of the pair.
pub fn entropy_energy_comparison(
    m: &VectorField2,
    eps: f64,
    pair: (&Entropy, &Entropy),
    region: &Mask,
) -> Result<EntropyComparison> {
    let energy = ag_energy(m, eps, region)?.total;
    let d1 = entropy_production_vector(m, pair.0, region)?;
    let d2 = entropy_production_vector(m, pair.1, region)?;
    let area = m.grid.cell_area();
    let cells: Vec<f64> = (0..m.grid.len())
        .filter(|&k| d1.mask.get(k))
        .map(|k| d1.values[k].hypot(d2.values[k]) * area)
        .collect();
    let total_variation = pairwise_sum(&cells);
    let ratio = if energy == 0.0 && total_variation == 0.0 { 0.0 } else { total_variation / energy };
    Ok(EntropyComparison { energy, total_variation, ratio })
}

/// One ε-rung of a continuation run.
#[derive(Debug, Clone)]
pub struct ContinuationRung {
    pub eps: f64,
    pub stream: StreamFunction,
    pub energy: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub stop: StopReason,
    pub trace: Vec<TraceStep>,
    pub comparison: EntropyComparison,
    pub divergence_defect: f64,
}

/// Warm-started minimizations down the ε schedule from the noisy distance function.
pub fn continuation_run(
    domain: &Domain,
    config: &MinimizeConfig,
    pair: (&Entropy, &Entropy),
) -> Result<Vec<ContinuationRung>> {
    config.validate()?;
    let mut stream = StreamFunction::initial(domain, config.noise, config.seed)?;
    let mut out = Vec::with_capacity(config.eps_count);
    for eps in config.schedule() {
        let res = minimize_stream(&stream, eps, config)?;
        stream = res.stream.clone();
        let m = stream.m();
        let comparison = entropy_energy_comparison(&m, eps, pair, &stream.omega)?;
        out.push(ContinuationRung {
            eps,
            energy: res.energy(),
            grad_norm: res.grad_norm(),
            iterations: res.iterations(),
            stop: res.stop,
            divergence_defect: stream.divergence_defect()?,
            trace: res.trace,
            comparison,
            stream: stream.clone(),
        });
    }
    Ok(out)
}

/// `epsilon,energy,grad_norm,iterations,entropy_tv,ratio`.
pub fn continuation_csv(rungs: &[ContinuationRung]) -> String {
    let mut s = String::from("epsilon,energy,grad_norm,iterations,entropy_tv,ratio\n");
    for r in rungs {
        s.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt_value(r.eps),
            fmt_value(r.energy),
            fmt_value(r.grad_norm),
            r.iterations,
            fmt_value(r.comparison.total_variation),
            fmt_value(r.comparison.ratio)
        ));
    }
    s
}

/// `E / (π ε ln(1/ε))`.
pub fn vortex_energy_ratio(energy: f64, eps: f64) -> f64 {
    energy / (PI * eps * (1.0 / eps).ln())
}

/// RMS angle between `m` and the vortex `i(x - c)/|x - c|` over `region` minus the core disk.
pub fn angular_rms_to_vortex(m: &VectorField2, center: [f64; 2], core: f64, region: &Mask) -> f64 {
    let g = &m.grid;
    let mut sq = Vec::new();
    for k in 0..g.len() {
        if !(region.get(k) && m.mask.get(k)) {
            continue;
        }
        let p = g.center_of(k);
        let (dx, dy) = (p[0] - center[0], p[1] - center[1]);
        if dx.hypot(dy) <= core {
            continue;
        }
        let v = m.at(k);
        let (c, s) = (v[0] * -dy + v[1] * dx, v[1] * -dy - v[0] * dx);
        sq.push(s.atan2(c).powi(2));
    }
    if sq.is_empty() {
        return f64::NAN;
    }
    (pairwise_sum(&sq) / sq.len() as f64).sqrt()
}

/// The optimal one-dimensional wall `m = (cos α, sin α · tanh(sin α (x₁ - x₀)/ε))`.
pub fn wall_profile(grid: &Grid2, mask: &Mask, alpha: f64, eps: f64, x0: f64) -> Result<VectorField2> {
    check_eps(eps)?;
    let s = alpha.sin();
    Ok(VectorField2::from_fn(grid, mask, |p| [alpha.cos(), s * (s * (p[0] - x0) / eps).tanh()]))
}

/// The vortex with core profile `tanh(r/ε)`.
pub fn mollified_vortex(grid: &Grid2, mask: &Mask, center: [f64; 2], eps: f64) -> Result<VectorField2> {
    check_eps(eps)?;
    Ok(VectorField2::from_fn(grid, mask, |p| {
        let (x, y) = (p[0] - center[0], p[1] - center[1]);
        let r = x.hypot(y);
        if r == 0.0 {
            return [0.0, 0.0];
        }
        let f = (r / eps).tanh() / r;
        [-y * f, x * f]
    }))
}
