//! Constants of the Besov bootstrap estimate along a list of shifts `τe₁`.

use super::fields::delta_field;
use super::kernel::TestKernel;
use super::xi::{beta_grid, coercivity_report, omega, XiMethod};
use crate::error::{Error, Result};
use crate::gridcore::{
    finite_difference_angle, gradient_norm, lp_norm, AngleField, Displacement, FdMode, RegionSpec,
    ScalarField, TestFunction,
};
use crate::quad::pairwise_sum;
use serde::Serialize;
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BootstrapRow {
    /// Shift actually used (a multiple of `hx`).
    pub tau: f64,
    /// `∫ Δ(x, τe₁) η² dx`
    pub lhs: f64,
    /// `τ sup_{τ′≤τ} ‖η² |D^{τ′}m|^γ‖_{p′} ‖F‖_p`
    pub holder_term: f64,
    /// `τ² ‖φ′‖₁ ‖∇η‖_∞ ‖F‖₁`
    pub phi1_term: f64,
    /// `τ² ‖φ‖₁ ‖∇η‖_∞ ‖∇m‖_{L¹(Ω∖Ω′)}`
    pub layer_term: f64,
    /// `∫ |D^τm|^{3p} η² dx / τ^p`
    pub c_tau: f64,
    /// `min_β Ξ/ω` of the kernel
    pub coercivity_c: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BootstrapTable {
    pub p: f64,
    pub gamma: f64,
    /// `min{dist(supp η, ∂Ω), dist(Ω′, ∂U)}` in grid units
    pub r0: f64,
    pub rows: Vec<BootstrapRow>,
}

impl BootstrapTable {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("tau,lhs,holder_term,phi1_term,layer_term,C_tau,coercivity_c\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
                r.tau, r.lhs, r.holder_term, r.phi1_term, r.layer_term, r.c_tau, r.coercivity_c
            );
        }
        s
    }

    pub fn sup_c(&self) -> f64 {
        self.rows.iter().map(|r| r.c_tau).fold(0.0, f64::max)
    }
}

/// Evaluates the bootstrap table with the kernel `γ = 3p - 3`.
///
/// Each τ is rounded to the nearest positive multiple of `hx`. Fails if some
/// τ reaches `r₀`, or if `∫ ½c ω(|D^τm|) η² ≤ ∫ Δ η²` is violated.
pub fn besov_bootstrap(
    m: &AngleField,
    f: Option<&ScalarField>,
    p: f64,
    regions: &RegionSpec,
    eta: &TestFunction,
    taus: &[f64],
) -> Result<BootstrapTable> {
    if !(p > 1.0 && p <= 2.0) {
        return Err(Error::InvalidArgument(format!("exponent p = {p} outside (1, 2]")));
    }
    let g = m.grid;
    let phi = TestKernel::for_p(p)?;
    let gamma = 3.0 * p - 3.0;
    let supp = eta.support_mask(&g);
    let sep = supp
        .separation_from_complement(&regions.omega)
        .min(regions.inner.separation_from_complement(&regions.u));
    let r0 = sep as f64 * g.hx.min(g.hy);
    let c = coercivity_report(&phi, &beta_grid(512))?.min_ratio;
    let grad_eta = eta.grad_sup();
    let (f_p, f_1) = match f {
        Some(f) => (lp_norm(f, p, &regions.omega)?, lp_norm(f, 1.0, &regions.omega)?),
        None => (0.0, 0.0),
    };
    let layer = regions.omega.and_not(&regions.inner);
    let grad_m_l1 = if layer.count() > 0 {
        let gn = gradient_norm(&m.to_vector(), &layer)?;
        lp_norm(&gn, 1.0, &layer).unwrap_or(0.0)
    } else {
        0.0
    };
    let eta2: Vec<f64> = (0..g.len()).map(|k| eta.value(g.center_of(k)).powi(2)).collect();
    let area = g.cell_area();
    let weighted = |vals: &dyn Fn(usize) -> Option<f64>| -> f64 {
        let v: Vec<f64> = (0..g.len())
            .filter(|&k| supp.get(k) && eta2[k] > 0.0)
            .filter_map(|k| vals(k).map(|x| x * eta2[k]))
            .collect();
        pairwise_sum(&v) * area
    };
    let dm_at = |n: i64| -> Result<ScalarField> {
        Ok(finite_difference_angle(m, Displacement::Cells(n, 0), FdMode::Difference)?.magnitude())
    };
    let p_conj = p / (p - 1.0);
    let mut holder_sup: f64 = 0.0;
    let mut computed = 0i64;
    let mut rows = Vec::with_capacity(taus.len());
    for &t in taus {
        let n = ((t / g.hx).round() as i64).max(1);
        let tau = n as f64 * g.hx;
        if tau >= r0 {
            return Err(Error::InvalidArgument(format!("τ = {tau} is not below r₀ = {r0}")));
        }
        // running sup over the shifts up to τ
        for q in computed + 1..=n {
            let dm = dm_at(q)?;
            let v: Vec<f64> = (0..g.len())
                .filter(|&k| supp.get(k) && dm.mask.get(k))
                .map(|k| (eta2[k] * dm.values[k].powf(gamma)).powf(p_conj))
                .collect();
            holder_sup = holder_sup.max((pairwise_sum(&v) * area).powf(1.0 / p_conj));
        }
        computed = computed.max(n);
        let delta = delta_field(m, &phi, Displacement::Cells(n, 0), XiMethod::ClosedForm)?;
        let dm = dm_at(n)?;
        let lhs = weighted(&|k| delta.mask.get(k).then(|| delta.values[k]));
        let dm_pow = weighted(&|k| dm.mask.get(k).then(|| dm.values[k].powf(3.0 * p)));
        let omega_side = weighted(&|k| dm.mask.get(k).then(|| 0.5 * c * omega(&phi, dm.values[k])));
        if omega_side > lhs * (1.0 + 1e-3) + 1e-14 {
            return Err(Error::Degenerate(format!(
                "coercivity link violated at τ = {tau}: {omega_side:e} > {lhs:e}"
            )));
        }
        rows.push(BootstrapRow {
            tau,
            lhs,
            holder_term: tau * holder_sup * f_p,
            phi1_term: tau * tau * phi.dphi_l1_norm() * grad_eta * f_1,
            layer_term: tau * tau * phi.l1_norm() * grad_eta * grad_m_l1,
            c_tau: dm_pow / tau.powf(p),
            coercivity_c: c,
        });
    }
    Ok(BootstrapTable { p, gamma, r0, rows })
}
