use super::domain::Domain;
use crate::error::{Error, Result};
use crate::gridcore::{divergence, Grid2, Mask, ScalarField, VectorField2};
use crate::quad::pairwise_sum;
use rayon::prelude::*;

/// Total energy and its per-cell density.
#[derive(Debug, Clone)]
pub struct AgEnergy {
    pub total: f64,
    pub density: ScalarField,
}

/// `∫_R (ε/2 |∇m|² + (1 - |m|²)²/(2ε))`.
///
/// `|∇m|²` at a cell averages the squared one-sided differences over its two
/// faces per axis. Every cell of `region` needs its four neighbors in `m.mask`.
pub fn ag_energy(m: &VectorField2, eps: f64, region: &Mask) -> Result<AgEnergy> {
    check_eps(eps)?;
    let reg = region.and(&m.mask);
    if reg.count() == 0 {
        return Err(Error::EmptyRegion("energy region misses the field".into()));
    }
    check_neighbors(&m.grid, &reg, &m.mask)?;
    let (total, density) = energy_core(&m.grid, &m.u, &m.v, &reg, eps);
    Ok(AgEnergy { total, density: ScalarField { grid: m.grid, mask: reg, values: density } })
}

pub(crate) fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("ε = {eps} must be positive")))
    }
}

fn check_neighbors(g: &Grid2, region: &Mask, defined: &Mask) -> Result<()> {
    for j in 0..g.ny as i64 {
        for i in 0..g.nx as i64 {
            if region.at(i, j)
                && !(defined.at(i + 1, j) && defined.at(i - 1, j) && defined.at(i, j + 1) && defined.at(i, j - 1))
            {
                return Err(Error::Support(format!("cell ({i}, {j}) lacks a neighbor with defined m")));
            }
        }
    }
    Ok(())
}

/// Row-parallel energy with a pairwise reduction of the row sums.
fn energy_core(g: &Grid2, m1: &[f64], m2: &[f64], region: &Mask, eps: f64) -> (f64, Vec<f64>) {
    let nx = g.nx;
    let (ax, ay) = (0.5 / (g.hx * g.hx), 0.5 / (g.hy * g.hy));
    let area = g.cell_area();
    let mut density = vec![f64::NAN; g.len()];
    let row_sums: Vec<f64> = density
        .par_chunks_mut(nx)
        .enumerate()
        .map(|(j, row)| {
            let mut acc = Vec::new();
            for (i, out) in row.iter_mut().enumerate() {
                let k = j * nx + i;
                if !region.cells[k] {
                    continue;
                }
                let mut grad = 0.0;
                for f in [m1, m2] {
                    let c = f[k];
                    grad += ax * ((f[k + 1] - c).powi(2) + (c - f[k - 1]).powi(2))
                        + ay * ((f[k + nx] - c).powi(2) + (c - f[k - nx]).powi(2));
                }
                let w = 1.0 - m1[k] * m1[k] - m2[k] * m2[k];
                let d = 0.5 * eps * grad + w * w / (2.0 * eps);
                *out = d;
                acc.push(d * area);
            }
            pairwise_sum(&acc)
        })
        .collect();
    (pairwise_sum(&row_sums), density)
}

/// Scalar stream function `u` on `Ω_δ`; `m = ∇^⊥u = (-∂₂u, ∂₁u)` by central differences.
///
/// Values on the layer `Ω_δ∖Ω` are the signed distance to `∂Ω` and never change.
#[derive(Debug, Clone)]
pub struct StreamFunction {
    pub grid: Grid2,
    pub u: Vec<f64>,
    /// Free nodes.
    pub omega: Mask,
    /// Frozen nodes.
    pub layer: Mask,
    m_mask: Mask,
}

impl StreamFunction {
    /// Signed distance plus uniform noise of amplitude `noise·h` on `Ω`.
    pub fn initial(domain: &Domain, noise: f64, seed: u64) -> Result<Self> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut u = domain.distance_values();
        let amp = noise * domain.grid.hx;
        for (k, v) in u.iter_mut().enumerate() {
            if domain.omega.get(k) {
                *v += amp * rng.gen_range(-1.0..1.0);
            }
        }
        Self::new(domain.grid, u, domain.omega.clone(), domain.layer.clone())
    }

    pub fn new(grid: Grid2, u: Vec<f64>, omega: Mask, layer: Mask) -> Result<Self> {
        if u.len() != grid.len() {
            return Err(Error::InvalidArgument("stream values do not match the grid".into()));
        }
        if omega.count() == 0 {
            return Err(Error::EmptyRegion("Ω has no cells".into()));
        }
        if omega.and(&layer).count() > 0 {
            return Err(Error::InvalidArgument("Ω and the layer overlap".into()));
        }
        let support = omega.or(&layer);
        if (0..grid.len()).any(|k| support.get(k) && !u[k].is_finite()) {
            return Err(Error::InvalidArgument("non-finite stream value".into()));
        }
        let m_mask = support.erode(1);
        check_neighbors(&grid, &omega, &m_mask)
            .map_err(|_| Error::Support("boundary layer too thin for the energy stencil".into()))?;
        Ok(Self { grid, u, omega, layer, m_mask })
    }

    /// Cells where `m` is defined.
    pub fn m_mask(&self) -> &Mask {
        &self.m_mask
    }

    /// Indices of the free nodes in row-major order.
    pub fn free_indices(&self) -> Vec<usize> {
        (0..self.grid.len()).filter(|&k| self.omega.get(k)).collect()
    }

    pub fn m(&self) -> VectorField2 {
        let (u, v) = perp_gradient(&self.grid, &self.u, &self.m_mask);
        VectorField2 { grid: self.grid, mask: self.m_mask.clone(), u, v }
    }

    /// `sup |div m|` over interior cells of `Ω`.
    pub fn divergence_defect(&self) -> Result<f64> {
        let d = divergence(&self.m(), &self.omega)?;
        Ok(d.values.iter().filter(|v| v.is_finite()).fold(0.0f64, |a, v| a.max(v.abs())))
    }

    pub fn energy(&self, eps: f64) -> Result<AgEnergy> {
        ag_energy(&self.m(), eps, &self.omega)
    }
}

fn perp_gradient(g: &Grid2, u: &[f64], mask: &Mask) -> (Vec<f64>, Vec<f64>) {
    let nx = g.nx;
    let (cx, cy) = (0.5 / g.hx, 0.5 / g.hy);
    let mut m1 = vec![f64::NAN; g.len()];
    let mut m2 = vec![f64::NAN; g.len()];
    m1.par_chunks_mut(nx).zip(m2.par_chunks_mut(nx)).enumerate().for_each(|(j, (r1, r2))| {
        for i in 0..nx {
            let k = j * nx + i;
            if mask.cells[k] {
                r1[i] = -(u[k + nx] - u[k - nx]) * cy;
                r2[i] = (u[k + 1] - u[k - 1]) * cx;
            }
        }
    });
    (m1, m2)
}

/// Energy of a stream function as a function of its free node values.
#[derive(Debug, Clone)]
pub struct StreamEnergy {
    base: StreamFunction,
    free: Vec<usize>,
    eps: f64,
}

impl StreamEnergy {
    pub fn new(stream: &StreamFunction, eps: f64) -> Result<Self> {
        check_eps(eps)?;
        Ok(Self { free: stream.free_indices(), base: stream.clone(), eps })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn dim(&self) -> usize {
        self.free.len()
    }

    pub fn cell_area(&self) -> f64 {
        self.base.grid.cell_area()
    }

    /// Current free values.
    pub fn free_values(&self, stream: &StreamFunction) -> Vec<f64> {
        self.free.iter().map(|&k| stream.u[k]).collect()
    }

    /// Stream function with the given free values.
    pub fn stream_with(&self, x: &[f64]) -> StreamFunction {
        let mut s = self.base.clone();
        for (&k, &v) in self.free.iter().zip(x) {
            s.u[k] = v;
        }
        s
    }

    fn full_u(&self, x: &[f64]) -> Vec<f64> {
        let mut u = self.base.u.clone();
        for (&k, &v) in self.free.iter().zip(x) {
            u[k] = v;
        }
        u
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let g = &self.base.grid;
        let (m1, m2) = perp_gradient(g, &self.full_u(x), &self.base.m_mask);
        energy_core(g, &m1, &m2, &self.base.omega, self.eps).0
    }

    /// Energy and its exact gradient with respect to the free values.
    pub fn value_grad(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let g = &self.base.grid;
        let (nx, n) = (g.nx, g.len());
        let u = self.full_u(x);
        let mm = &self.base.m_mask;
        let om = &self.base.omega;
        let (m1, m2) = perp_gradient(g, &u, mm);
        let (e, _) = energy_core(g, &m1, &m2, om, self.eps);

        // dE/dm, gathered per cell
        let eps = self.eps;
        let area = g.cell_area();
        let (ax, ay) = (0.5 / (g.hx * g.hx), 0.5 / (g.hy * g.hy));
        let mut g1 = vec![0.0; n];
        let mut g2 = vec![0.0; n];
        g1.par_chunks_mut(nx).zip(g2.par_chunks_mut(nx)).enumerate().for_each(|(j, (r1, r2))| {
            for i in 0..nx {
                let k = j * nx + i;
                if !mm.cells[k] {
                    continue;
                }
                let here = om.cells[k];
                let mut d = [0.0; 2];
                for (nb, a) in [(k + 1, ax), (k - 1, ax), (k + nx, ay), (k - nx, ay)] {
                    let w = a * (here as u8 + om.cells[nb] as u8) as f64;
                    if w == 0.0 {
                        continue;
                    }
                    d[0] += 2.0 * w * (m1[k] - m1[nb]);
                    d[1] += 2.0 * w * (m2[k] - m2[nb]);
                }
                d[0] *= 0.5 * eps;
                d[1] *= 0.5 * eps;
                if here {
                    let s = -(2.0 / eps) * (1.0 - m1[k] * m1[k] - m2[k] * m2[k]);
                    d[0] += s * m1[k];
                    d[1] += s * m2[k];
                }
                r1[i] = area * d[0];
                r2[i] = area * d[1];
            }
        });

        // adjoint of the perp-gradient stencil
        let (cx, cy) = (0.5 / g.hx, 0.5 / g.hy);
        let grad = self
            .free
            .par_iter()
            .map(|&k| (g1[k + nx] - g1[k - nx]) * cy + (g2[k - 1] - g2[k + 1]) * cx)
            .collect();
        (e, grad)
    }
}
