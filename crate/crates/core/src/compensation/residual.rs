//! Weak form of `d/dτ Δ(x, τe₁) = I^τ + div A^τ` against `η(x) ρ(τ)`.

use super::discrete::{DiscreteEngine, EnginePath};
use super::kernel::TestKernel;
use crate::error::{Error, Result};
use crate::gridcore::TestFunction;
use crate::kinetic::{KineticDensity, KineticField};
use crate::quad::pairwise_sum;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualReport {
    /// `-∬ Δ η ρ′`
    pub lhs: f64,
    /// `∬ (I η - A·∇η) ρ`
    pub rhs: f64,
    /// `|lhs - rhs|`
    pub residual: f64,
    pub tau_nodes: usize,
}

impl ResidualReport {
    pub fn relative(&self) -> f64 {
        self.residual / self.lhs.abs().max(self.rhs.abs()).max(f64::MIN_POSITIVE)
    }
}

/// Residual of the compensation identity.
///
/// τ runs over the multiples of `hx` in `(0, τ_max)` with the trapezoid rule
/// (ρ vanishes at both ends); s-integrals are sums over the s-grid of `χ`.
pub fn comp_identity_residual(
    chi: &KineticField,
    sigma: Option<&KineticDensity>,
    phi: &TestKernel,
    eta: &TestFunction,
    rho: &TestFunction,
    tau_max: f64,
) -> Result<ResidualReport> {
    comp_identity_residual_with(chi, sigma, phi, eta, rho, tau_max, EnginePath::Auto)
}

/// [`comp_identity_residual`] with an explicit s-integration path.
pub fn comp_identity_residual_with(
    chi: &KineticField,
    sigma: Option<&KineticDensity>,
    phi: &TestKernel,
    eta: &TestFunction,
    rho: &TestFunction,
    tau_max: f64,
    path: EnginePath,
) -> Result<ResidualReport> {
    let g = chi.grid;
    let (rlo, rhi) = rho.support_box();
    if !(rlo[0] >= 0.0 && rhi[0] <= tau_max) {
        return Err(Error::Support(format!("ρ must be supported in (0, {tau_max})")));
    }
    let n_tau = (tau_max / g.hx + 1e-9).floor() as usize;
    if n_tau < 2 {
        return Err(Error::InvalidArgument("τ_max must span at least two cells".into()));
    }
    eta.check_support(&g, &chi.mask, (n_tau as i64, 0))?;
    let taus: Vec<(usize, f64, f64)> = (1..=n_tau)
        .map(|n| {
            let t = [n as f64 * g.hx, 0.0];
            (n, rho.value(t), rho.grad(t)[0])
        })
        .filter(|&(_, r, dr)| r != 0.0 || dr != 0.0)
        .collect();
    let eng = DiscreteEngine::new(chi, sigma, phi, path)?;
    let supp = eta.support_mask(&g);
    let rows: Vec<(f64, f64)> = (0..g.ny)
        .into_par_iter()
        .filter(|&j| (0..g.nx).any(|i| supp.get(g.idx(i, j))))
        .map(|j| {
            let reps = eng.row(j);
            let mut lhs = Vec::new();
            let mut rhs = Vec::new();
            for i in 0..g.nx {
                let k = g.idx(i, j);
                if !supp.get(k) {
                    continue;
                }
                let x = g.center_of(k);
                let (e, ge) = (eta.value(x), eta.grad(x));
                let c0 = reps[i].as_ref().expect("support checked");
                let (mut l, mut r) = (Vec::with_capacity(taus.len()), Vec::with_capacity(taus.len()));
                for &(n, rv, drv) in &taus {
                    let c1 = reps[i + n].as_ref().expect("support checked");
                    let t = eng.terms(c0, c1);
                    l.push(-t.delta * e * drv);
                    r.push((t.i * e - t.a[0] * ge[0] - t.a[1] * ge[1]) * rv);
                }
                lhs.push(pairwise_sum(&l));
                rhs.push(pairwise_sum(&r));
            }
            (pairwise_sum(&lhs), pairwise_sum(&rhs))
        })
        .collect();
    let w = g.hx * g.cell_area();
    let lhs = w * pairwise_sum(&rows.iter().map(|r| r.0).collect::<Vec<_>>());
    let rhs = w * pairwise_sum(&rows.iter().map(|r| r.1).collect::<Vec<_>>());
    Ok(ResidualReport { lhs, rhs, residual: (lhs - rhs).abs(), tau_nodes: n_tau })
}
