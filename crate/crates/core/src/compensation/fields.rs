//! Cellwise `Δ`, `A^τ` and `I^τ` fields.

use super::arcs::KernelPrimitives;
use super::discrete::{CellTerms, DiscreteEngine, EnginePath};
use super::gh::h_func;
use super::kernel::TestKernel;
use super::xi::{xi_double, XiMethod, XiTable};
use crate::error::{Error, Result};
use crate::gridcore::{
    sample_unit, wrap_angle, AngleField, Displacement, Grid2, Mask, ScalarField, VectorField2,
};
use crate::kinetic::{KineticDensity, KineticField};
use crate::quad::adaptive_split;
use rayon::prelude::*;
use std::f64::consts::PI;

/// `x ↦ m(x + h)` on the cells where it is defined.
fn translated(m: &AngleField, h: Displacement) -> Vec<Option<[f64; 2]>> {
    let g = m.grid;
    let hv = h.vector(&g);
    (0..g.len())
        .into_par_iter()
        .map(|k| {
            if !m.mask.get(k) {
                return None;
            }
            match h {
                Displacement::Cells(di, dj) => {
                    let (i, j) = g.ij(k);
                    let t = g.offset(i, j, di, dj)?;
                    m.mask.get(t).then(|| m.m(t))
                }
                Displacement::Offset(_) => {
                    let c = g.center_of(k);
                    sample_unit(m, [c[0] + hv[0], c[1] + hv[1]])
                }
            }
        })
        .collect()
}

fn angle_of(z: [f64; 2]) -> f64 {
    z[1].atan2(z[0])
}

fn scalar_from(grid: Grid2, vals: Vec<Option<f64>>) -> Result<ScalarField> {
    let mut mask = Mask::empty(&grid);
    let mut out = vec![f64::NAN; grid.len()];
    for (k, v) in vals.into_iter().enumerate() {
        if let Some(v) = v {
            mask.cells[k] = true;
            out[k] = v;
        }
    }
    if mask.count() == 0 {
        return Err(Error::EmptyRegion("no cell admits the displacement".into()));
    }
    ScalarField::new(grid, mask, out)
}

/// `Δ(x, h) = ½ Ξ(m(x), m(x + h))`.
///
/// The closed-form path interpolates a Ξ table; the direct path evaluates the
/// defining double integral of `D^hχ` in every cell.
pub fn delta_field(m: &AngleField, phi: &TestKernel, h: Displacement, method: XiMethod) -> Result<ScalarField> {
    let shifted = translated(m, h);
    let table = (method == XiMethod::ClosedForm).then(|| XiTable::new(phi, XiTable::DEFAULT_SIZE));
    let vals = (0..m.grid.len())
        .into_par_iter()
        .map(|k| {
            let z1 = shifted[k]?;
            let z0 = m.m(k);
            Some(match &table {
                Some(t) => 0.5 * t.eval_pair(z0, z1),
                None => 0.5 * xi_double(phi, angle_of(z0), angle_of(z1)),
            })
        })
        .collect();
    scalar_from(m.grid, vals)
}

/// `A^τ` for `χ = 1_{e^{is}·m > 0}`, shift `τ = cells·hx`.
pub fn a_field(m: &AngleField, phi: &TestKernel, tau_cells: usize) -> Result<VectorField2> {
    let shifted = translated(m, Displacement::Cells(tau_cells as i64, 0));
    let prim = KernelPrimitives::new(phi, KernelPrimitives::DEFAULT_SIZE);
    let vals: Vec<Option<[f64; 2]>> = (0..m.grid.len())
        .into_par_iter()
        .map(|k| shifted[k].map(|z1| prim.a_pair(m.theta[k], angle_of(z1))))
        .collect();
    let g = m.grid;
    let mut mask = Mask::empty(&g);
    let (mut u, mut v) = (vec![f64::NAN; g.len()], vec![f64::NAN; g.len()]);
    for (k, a) in vals.into_iter().enumerate() {
        if let Some(a) = a {
            mask.cells[k] = true;
            u[k] = a[0];
            v[k] = a[1];
        }
    }
    if mask.count() == 0 {
        return Err(Error::EmptyRegion("no cell admits the shift".into()));
    }
    VectorField2::new(g, mask, u, v)
}

/// Input of [`i_field`].
#[derive(Debug, Clone, Copy)]
pub enum IInput<'a> {
    /// Kinetic pair with σ given on the s-grid.
    General { chi: &'a KineticField, sigma: &'a KineticDensity },
    /// `σ = (δ_{θ+π/2} + δ_{θ-π/2}) F` for `χ = 1_{e^{is}·m > 0}`.
    Parametric { m: &'a AngleField, f: &'a ScalarField },
}

/// `I^τ` for the shift `τ = cells·hx`.
///
/// The general path evaluates `∫Θφ(t-s)ds = ∫φ′(t-s)σ(s)ds` on the s-grid
/// (exactly for trigonometric data). The parametric path uses
/// `I₁ + I₂ - D^τI₃` with
/// `I₁ = 4F(x) H(m(x), m(x+τ)/m(x))`,
/// `I₂ = -4F(x+τ) H(m(x+τ), m(x)/m(x+τ))`,
/// `I₃ = 2F G(im, m)`.
/// Angle ratios use the principal branch.
pub fn i_field(input: IInput<'_>, phi: &TestKernel, tau_cells: usize) -> Result<ScalarField> {
    match input {
        IInput::General { chi, sigma } => {
            let exact = matches!(chi.data, crate::kinetic::KineticData::Trig { .. })
                && matches!(sigma, KineticDensity::Trig { .. });
            let path = if exact { EnginePath::Exact } else { EnginePath::Auto };
            let (_, _, i) = discrete_fields(chi, Some(sigma), phi, tau_cells, path)?;
            Ok(i)
        }
        IInput::Parametric { m, f } => {
            let g = m.grid;
            let i3c = i3_coefficients(phi);
            let i3 = |k: usize| {
                let th = m.theta[k];
                2.0 * f.values[k] * (th.cos() * i3c[0] - th.sin() * i3c[1])
            };
            let vals = (0..g.len())
                .into_par_iter()
                .map(|k| {
                    if !m.mask.get(k) || !f.mask.get(k) {
                        return None;
                    }
                    let (i, j) = g.ij(k);
                    let t = g.offset(i, j, tau_cells as i64, 0)?;
                    if !m.mask.get(t) || !f.mask.get(t) {
                        return None;
                    }
                    let (th0, th1) = (m.theta[k], m.theta[t]);
                    let beta = wrap_angle(th1 - th0);
                    let i1 = 4.0 * f.values[k] * h_func(phi, th0, beta);
                    let i2 = -4.0 * f.values[t] * h_func(phi, th1, -beta);
                    Some(i1 + i2 - (i3(t) - i3(k)))
                })
                .collect();
            scalar_from(g, vals)
        }
    }
}

/// `∫_{-π}^0 φ′(u) (cos u, sin u) du`, so that `G(im, m) = c₀ cos θ - c₁ sin θ`.
fn i3_coefficients(phi: &TestKernel) -> [f64; 2] {
    let br = phi.seams_in(-PI, 0.0, 0.0);
    [
        adaptive_split(|u| phi.dphi(u) * u.cos(), -PI, 0.0, &br, 1e-15, 1e-14),
        adaptive_split(|u| phi.dphi(u) * u.sin(), -PI, 0.0, &br, 1e-15, 1e-14),
    ]
}

/// `I₃(x) = 2F(x) G(im(x), m(x))` for a single angle.
pub fn i3_parametric(phi: &TestKernel, theta: f64, f: f64) -> f64 {
    let c = i3_coefficients(phi);
    2.0 * f * (theta.cos() * c[0] - theta.sin() * c[1])
}

/// `Δ(·, τe₁)`, `A^τ` and `I^τ` with s-integrals on the s-grid of `χ`.
pub fn discrete_fields(
    chi: &KineticField,
    sigma: Option<&KineticDensity>,
    phi: &TestKernel,
    tau_cells: usize,
    path: EnginePath,
) -> Result<(ScalarField, VectorField2, ScalarField)> {
    let eng = DiscreteEngine::new(chi, sigma, phi, path)?;
    let g = chi.grid;
    let rows: Vec<Vec<Option<CellTerms>>> = (0..g.ny)
        .into_par_iter()
        .map(|j| {
            let reps = eng.row(j);
            (0..g.nx)
                .map(|i| {
                    let c0 = reps[i].as_ref()?;
                    let c1 = reps.get(i + tau_cells)?.as_ref()?;
                    Some(eng.terms(c0, c1))
                })
                .collect()
        })
        .collect();
    let mut mask = Mask::empty(&g);
    let mut d = vec![f64::NAN; g.len()];
    let (mut u, mut v) = (vec![f64::NAN; g.len()], vec![f64::NAN; g.len()]);
    let mut ii = vec![f64::NAN; g.len()];
    for (j, row) in rows.into_iter().enumerate() {
        for (i, t) in row.into_iter().enumerate() {
            if let Some(t) = t {
                let k = g.idx(i, j);
                mask.cells[k] = true;
                d[k] = t.delta;
                u[k] = t.a[0];
                v[k] = t.a[1];
                ii[k] = t.i;
            }
        }
    }
    if mask.count() == 0 {
        return Err(Error::EmptyRegion("no cell admits the shift".into()));
    }
    Ok((
        ScalarField::new(g, mask.clone(), d)?,
        VectorField2::new(g, mask.clone(), u, v)?,
        ScalarField::new(g, mask, ii)?,
    ))
}

/// `sup |A^τ| / (‖φ‖_{L¹} |D^τm|)` over cells with `D^τm ≠ 0`; `None` if `A ≢ 0` where `D^τm = 0`.
pub fn a_bound_ratio(m: &AngleField, a: &VectorField2, phi: &TestKernel, tau_cells: usize) -> Option<f64> {
    let g = m.grid;
    let l1 = phi.l1_norm();
    let mut best: f64 = 0.0;
    for k in 0..g.len() {
        if !a.mask.get(k) {
            continue;
        }
        let (i, j) = g.ij(k);
        let Some(t) = g.offset(i, j, tau_cells as i64, 0) else {
            continue;
        };
        let (z0, z1) = (m.m(k), m.m(t));
        let dm = (z1[0] - z0[0]).hypot(z1[1] - z0[1]);
        let amag = a.u[k].hypot(a.v[k]);
        if dm == 0.0 {
            if amag > 1e-12 {
                return None;
            }
            continue;
        }
        best = best.max(amag / (l1 * dm));
    }
    Some(best)
}
