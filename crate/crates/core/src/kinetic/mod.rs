//! Kinetic formulation: the angular indicator `χ(s, x) = 1_{m(x)·e^{is} > 0}`,
//! the distribution `Θ = e^{is}·∇ₓχ` in weak form, and the density `σ` with
//! `Θ = ∂ₛσ`.
//!
//! `(s, x)` data is never stored densely unless it was read from disk: the
//! indicator is generated from the angle field and synthetic pairs keep their
//! low-order trigonometric coefficients.

mod io;

pub use io::{read_kinetic, write_kinetic, KineticStack};

use crate::entropy::TorusFunction;
use crate::error::{Error, Result};
use crate::gridcore::{AngleField, Grid2, Mask, ScalarField, TestFunction};
use crate::quad::pairwise_sum;
use rayon::prelude::*;
use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

/// Uniform angles `s_k = (k + ½)·2π/Ns`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SGrid {
    pub ns: usize,
}

impl SGrid {
    pub fn new(ns: usize) -> Result<Self> {
        if ns < 128 || !ns.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "Ns = {ns} must be even and >= 128"
            )));
        }
        Ok(Self { ns })
    }

    #[inline]
    pub fn ds(&self) -> f64 {
        2.0 * PI / self.ns as f64
    }

    #[inline]
    pub fn node(&self, k: usize) -> f64 {
        (k as f64 + 0.5) * self.ds()
    }
}

/// Storage for `χ(s, x)`.
#[derive(Debug, Clone)]
pub enum KineticData {
    /// `χ = 1_{cos(s - θ(x)) > 0}`.
    Indicator(AngleField),
    /// `χ = a cos s + b sin s + c`, per cell.
    Trig {
        a: Vec<f64>,
        b: Vec<f64>,
        c: Vec<f64>,
    },
    /// Samples, cell-major: `values[idx·Ns + k]`.
    Sampled(Vec<f64>),
}

#[derive(Debug, Clone)]
pub struct KineticField {
    pub s: SGrid,
    pub grid: Grid2,
    pub mask: Mask,
    pub data: KineticData,
}

impl KineticField {
    pub fn is_indicator(&self) -> bool {
        matches!(self.data, KineticData::Indicator(_))
    }

    /// `χ(s_k, x_idx)`.
    pub fn value(&self, k: usize, idx: usize) -> f64 {
        let s = self.s.node(k);
        match &self.data {
            KineticData::Indicator(m) => indicator(s, m.theta[idx]),
            KineticData::Trig { a, b, c } => a[idx] * s.cos() + b[idx] * s.sin() + c[idx],
            KineticData::Sampled(v) => v[idx * self.s.ns + k],
        }
    }

    /// The s-section at one cell.
    pub fn section(&self, idx: usize, out: &mut [f64]) {
        for (k, o) in out.iter_mut().enumerate() {
            *o = self.value(k, idx);
        }
    }

    /// Dense copy of the samples.
    pub fn to_sampled(&self) -> Vec<f64> {
        let ns = self.s.ns;
        let mut v = vec![f64::NAN; ns * self.grid.len()];
        for idx in 0..self.grid.len() {
            if self.mask.get(idx) {
                self.section(idx, &mut v[idx * ns..(idx + 1) * ns]);
            }
        }
        v
    }
}

#[inline]
fn indicator(s: f64, theta: f64) -> f64 {
    if (s - theta).cos() > 0.0 {
        1.0
    } else {
        0.0
    }
}

/// `σ(s, x)`.
#[derive(Debug, Clone)]
pub enum KineticDensity {
    /// `σ = (δ_{θ+π/2} + δ_{θ-π/2})(s) F(x)`.
    Parametric { theta: AngleField, f: ScalarField },
    /// Coefficients of `1, cos s, sin s, cos 2s, sin 2s`, per cell.
    Trig {
        s: SGrid,
        grid: Grid2,
        mask: Mask,
        coeffs: Vec<[f64; 5]>,
    },
    /// Samples, cell-major.
    Sampled {
        s: SGrid,
        grid: Grid2,
        mask: Mask,
        values: Vec<f64>,
    },
}

impl KineticDensity {
    pub fn parametric(theta: AngleField, f: ScalarField) -> Result<Self> {
        for k in 0..theta.grid.len() {
            if theta.mask.get(k) && !(f.mask.get(k) && f.values[k].is_finite()) {
                return Err(Error::InvalidArgument(
                    "F must be finite on the unmasked cells".into(),
                ));
            }
        }
        Ok(Self::Parametric { theta, f })
    }

    /// `σ(s_k, x_idx)` for the sampled variants.
    pub fn value(&self, k: usize, idx: usize) -> Option<f64> {
        match self {
            Self::Parametric { .. } => None,
            Self::Trig { s, coeffs, .. } => Some(trig5(&coeffs[idx], s.node(k))),
            Self::Sampled { s, values, .. } => Some(values[idx * s.ns + k]),
        }
    }

    pub fn s_grid(&self) -> Option<SGrid> {
        match self {
            Self::Parametric { .. } => None,
            Self::Trig { s, .. } | Self::Sampled { s, .. } => Some(*s),
        }
    }

    pub fn grid(&self) -> &Grid2 {
        match self {
            Self::Parametric { theta, .. } => &theta.grid,
            Self::Trig { grid, .. } | Self::Sampled { grid, .. } => grid,
        }
    }

    pub fn mask(&self) -> &Mask {
        match self {
            Self::Parametric { theta, .. } => &theta.mask,
            Self::Trig { mask, .. } | Self::Sampled { mask, .. } => mask,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Self::Parametric { theta, f } => {
                (0..f.grid.len()).all(|k| !theta.mask.get(k) || f.values[k] == 0.0)
            }
            Self::Trig { coeffs, .. } => coeffs
                .iter()
                .all(|c| c.iter().all(|&v| v == 0.0 || v.is_nan())),
            Self::Sampled { values, .. } => values.iter().all(|&v| v == 0.0 || v.is_nan()),
        }
    }

    /// The s-section at one cell (sampled variants only).
    pub fn section(&self, idx: usize, out: &mut [f64]) -> Result<()> {
        if let Self::Parametric { .. } = self {
            return Err(Error::InvalidArgument(
                "parametric density has no s-samples".into(),
            ));
        }
        for (k, o) in out.iter_mut().enumerate() {
            *o = self.value(k, idx).expect("sampled");
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn trig5(c: &[f64; 5], s: f64) -> f64 {
    let (c1, s1) = (s.cos(), s.sin());
    let (c2, s2) = (c1 * c1 - s1 * s1, 2.0 * s1 * c1);
    c[0] + c[1] * c1 + c[2] * s1 + c[3] * c2 + c[4] * s2
}

/// Indicator field of `m` on `Ns` angles.
pub fn chi_field(m: &AngleField, ns: usize) -> Result<KineticField> {
    let s = SGrid::new(ns)?;
    Ok(KineticField {
        s,
        grid: m.grid,
        mask: m.mask.clone(),
        data: KineticData::Indicator(m.clone()),
    })
}

/// A smooth test function `ζ(s, x)` on `𝕋 × Ω`.
pub trait KineticTest: Sync {
    fn value(&self, s: f64, x: [f64; 2]) -> f64;
    fn grad_x(&self, s: f64, x: [f64; 2]) -> [f64; 2];
    fn ds(&self, s: f64, x: [f64; 2]) -> f64;
    /// Cells where `ζ(·, x)` may be nonzero.
    fn support(&self, grid: &Grid2) -> Mask;
}

/// Angular factor of a product test function.
#[derive(Debug, Clone)]
pub enum Angular {
    Cos(u32),
    Sin(u32),
    Table(TorusFunction),
}

impl Angular {
    pub fn value(&self, s: f64) -> f64 {
        match self {
            Self::Cos(k) => (*k as f64 * s).cos(),
            Self::Sin(k) => (*k as f64 * s).sin(),
            Self::Table(t) => t.eval(s),
        }
    }

    pub fn derivative(&self, s: f64) -> f64 {
        match self {
            Self::Cos(k) => -(*k as f64) * (*k as f64 * s).sin(),
            Self::Sin(k) => *k as f64 * (*k as f64 * s).cos(),
            Self::Table(t) => t.derivative(s),
        }
    }
}

/// `ζ(s, x) = ψ(s) w(x)`.
#[derive(Debug, Clone)]
pub struct ProductTest {
    pub angular: Angular,
    pub w: TestFunction,
}

impl KineticTest for ProductTest {
    fn value(&self, s: f64, x: [f64; 2]) -> f64 {
        self.angular.value(s) * self.w.value(x)
    }
    fn grad_x(&self, s: f64, x: [f64; 2]) -> [f64; 2] {
        let a = self.angular.value(s);
        let g = self.w.grad(x);
        [a * g[0], a * g[1]]
    }
    fn ds(&self, s: f64, x: [f64; 2]) -> f64 {
        self.angular.derivative(s) * self.w.value(x)
    }
    fn support(&self, grid: &Grid2) -> Mask {
        self.w.support_mask(grid)
    }
}

fn check_support(zeta: &dyn KineticTest, grid: &Grid2, mask: &Mask) -> Result<Mask> {
    let supp = zeta.support(grid);
    if !supp.is_subset_of(mask) {
        return Err(Error::Support(
            "test function support leaves the unmasked region".into(),
        ));
    }
    Ok(supp)
}

/// Row-parallel cell sum with a deterministic reduction.
fn cell_sum<F>(grid: &Grid2, cells: &Mask, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let rows: Vec<f64> = (0..grid.ny)
        .into_par_iter()
        .map(|j| {
            let vals: Vec<f64> = (0..grid.nx)
                .map(|i| grid.idx(i, j))
                .filter(|&k| cells.get(k))
                .map(&f)
                .collect();
            pairwise_sum(&vals)
        })
        .collect();
    pairwise_sum(&rows) * grid.cell_area()
}

/// `⟨Θ, ζ⟩ = -∬ χ e^{is}·∇ₓζ ds dx`.
pub fn theta_pairing(chi: &KineticField, zeta: &dyn KineticTest) -> Result<f64> {
    let supp = check_support(zeta, &chi.grid, &chi.mask)?;
    let sg = chi.s;
    let total = cell_sum(&chi.grid, &supp, |idx| {
        let x = chi.grid.center_of(idx);
        let mut acc = 0.0;
        for k in 0..sg.ns {
            let s = sg.node(k);
            let v = chi.value(k, idx);
            if v != 0.0 {
                let g = zeta.grad_x(s, x);
                acc += v * (s.cos() * g[0] + s.sin() * g[1]);
            }
        }
        acc * sg.ds()
    });
    Ok(-total)
}

/// `⟨∂ₛσ, ζ⟩ = -∬ σ ∂ₛζ`; the parametric variant evaluates `∂ₛζ` at `θ ± π/2` exactly.
pub fn sigma_pairing(sigma: &KineticDensity, zeta: &dyn KineticTest) -> Result<f64> {
    let grid = *sigma.grid();
    let supp = check_support(zeta, &grid, sigma.mask())?;
    let total = match sigma {
        KineticDensity::Parametric { theta, f } => cell_sum(&grid, &supp, |idx| {
            let x = grid.center_of(idx);
            let t = theta.theta[idx];
            (zeta.ds(t + FRAC_PI_2, x) + zeta.ds(t - FRAC_PI_2, x)) * f.values[idx]
        }),
        _ => {
            let sg = sigma.s_grid().expect("sampled");
            cell_sum(&grid, &supp, |idx| {
                let x = grid.center_of(idx);
                let mut acc = 0.0;
                for k in 0..sg.ns {
                    acc += sigma.value(k, idx).expect("sampled") * zeta.ds(sg.node(k), x);
                }
                acc * sg.ds()
            })
        }
    };
    Ok(-total)
}

/// A smooth scalar given by closed-form value and gradient.
#[derive(Clone)]
pub struct SmoothScalar {
    value: Arc<dyn Fn([f64; 2]) -> f64 + Send + Sync>,
    grad: Arc<dyn Fn([f64; 2]) -> [f64; 2] + Send + Sync>,
}

impl std::fmt::Debug for SmoothScalar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("SmoothScalar")
    }
}

impl SmoothScalar {
    pub fn new<V, G>(value: V, grad: G) -> Self
    where
        V: Fn([f64; 2]) -> f64 + Send + Sync + 'static,
        G: Fn([f64; 2]) -> [f64; 2] + Send + Sync + 'static,
    {
        Self {
            value: Arc::new(value),
            grad: Arc::new(grad),
        }
    }

    pub fn zero() -> Self {
        Self::new(|_| 0.0, |_| [0.0, 0.0])
    }

    pub fn value(&self, p: [f64; 2]) -> f64 {
        (self.value)(p)
    }

    pub fn grad(&self, p: [f64; 2]) -> [f64; 2] {
        (self.grad)(p)
    }
}

/// The built-in compatible triple `a = sin x₂`, `b = sin x₁`, `c = 0`.
pub fn builtin_abc() -> (SmoothScalar, SmoothScalar, SmoothScalar) {
    (
        SmoothScalar::new(|p| p[1].sin(), |p| [0.0, p[1].cos()]),
        SmoothScalar::new(|p| p[0].sin(), |p| [p[0].cos(), 0.0]),
        SmoothScalar::zero(),
    )
}

/// Synthetic pair `χ = a cos s + b sin s + c` with `σ = ∫₀^s Θ dt`.
///
/// The antiderivative is taken exactly; the secular term `(∂₁a + ∂₂b)s/2`
/// vanishes under the compatibility condition and is dropped.
pub fn synthetic_kinetic_pair(
    grid: &Grid2,
    mask: &Mask,
    ns: usize,
    a: &SmoothScalar,
    b: &SmoothScalar,
    c: &SmoothScalar,
) -> Result<(KineticField, KineticDensity)> {
    let sg = SGrid::new(ns)?;
    let n = grid.len();
    let mut defect = vec![f64::NAN; n];
    let mut max_defect: f64 = 0.0;
    let (mut av, mut bv, mut cv) = (vec![f64::NAN; n], vec![f64::NAN; n], vec![f64::NAN; n]);
    let mut coeffs = vec![[f64::NAN; 5]; n];
    for k in 0..n {
        if !mask.get(k) {
            continue;
        }
        let p = grid.center_of(k);
        let (ga, gb, gc) = (a.grad(p), b.grad(p), c.grad(p));
        defect[k] = ga[0] + gb[1];
        max_defect = max_defect.max(defect[k].abs());
        av[k] = a.value(p);
        bv[k] = b.value(p);
        cv[k] = c.value(p);
        let cross = ga[1] + gb[0];
        coeffs[k] = [
            0.25 * cross + gc[1],
            -gc[1],
            gc[0],
            -0.25 * cross,
            0.25 * (ga[0] - gb[1]),
        ];
    }
    if max_defect > 1e-8 {
        return Err(Error::Compatibility { max_defect, defect });
    }
    let chi = KineticField {
        s: sg,
        grid: *grid,
        mask: mask.clone(),
        data: KineticData::Trig {
            a: av,
            b: bv,
            c: cv,
        },
    };
    let sigma = KineticDensity::Trig {
        s: sg,
        grid: *grid,
        mask: mask.clone(),
        coeffs,
    };
    Ok((chi, sigma))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indicator_of_e1() {
        let g = Grid2::square(0.0, 1.0, 4).unwrap();
        let m = AngleField::from_fn(&g, &Mask::full(&g), |_| 0.0);
        let chi = chi_field(&m, 128).unwrap();
        assert_eq!(chi.value(0, 0), 1.0);
        assert_eq!(chi.value(64, 0), 0.0);
        assert!(chi_field(&m, 130).is_ok());
        assert!(chi_field(&m, 127).is_err());
    }

    #[test]
    fn arc_length_and_reconstruction() {
        let g = Grid2::square(0.0, 1.0, 4).unwrap();
        let m = AngleField::from_fn(&g, &Mask::full(&g), |p| 3.0 * p[0] - 1.0 + p[1]);
        let chi = chi_field(&m, 512).unwrap();
        let ds = chi.s.ds();
        for idx in 0..g.len() {
            let mut sec = vec![0.0; 512];
            chi.section(idx, &mut sec);
            let len: f64 = sec.iter().sum::<f64>() * ds;
            assert!((len - PI).abs() <= ds + 1e-12);
            let (mut cx, mut cy) = (0.0, 0.0);
            for (k, v) in sec.iter().enumerate() {
                cx += v * chi.s.node(k).cos() * ds;
                cy += v * chi.s.node(k).sin() * ds;
            }
            let mm = m.m(idx);
            assert!((cx - 2.0 * mm[0]).abs() < 2.0 * ds && (cy - 2.0 * mm[1]).abs() < 2.0 * ds);
        }
    }

    #[test]
    fn builtin_sigma_closed_form() {
        let g = Grid2::square(0.0, 2.0 * PI, 8).unwrap();
        let (a, b, c) = builtin_abc();
        let (_, sigma) = synthetic_kinetic_pair(&g, &Mask::full(&g), 128, &a, &b, &c).unwrap();
        for idx in [0, 9, 40] {
            let p = g.center_of(idx);
            for k in [0, 17, 100] {
                let s = SGrid { ns: 128 }.node(k);
                let want = 0.5 * s.sin().powi(2) * (p[0].cos() + p[1].cos());
                assert!((sigma.value(k, idx).unwrap() - want).abs() < 1e-14);
            }
        }
    }
}
