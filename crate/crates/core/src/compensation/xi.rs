use super::kernel::TestKernel;
use crate::error::{Error, Result};
use crate::quad::{adaptive_split, pairwise_sum};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

const TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XiMethod {
    DoubleQuadrature,
    ClosedForm,
}

/// Half the angular separation of two unit vectors, in `[0, π/2]`.
pub fn half_separation(z1: [f64; 2], z2: [f64; 2]) -> f64 {
    // angle of z2·conj(z1)
    let c = z2[0] * z1[0] + z2[1] * z1[1];
    let s = z2[1] * z1[0] - z2[0] * z1[1];
    0.5 * s.atan2(c).abs()
}

/// `Ξ^φ(z1, z2)`.
pub fn xi_phi(phi: &TestKernel, z1: [f64; 2], z2: [f64; 2], method: XiMethod) -> f64 {
    match method {
        XiMethod::ClosedForm => xi_closed(phi, half_separation(z1, z2)),
        XiMethod::DoubleQuadrature => xi_double(phi, z1[1].atan2(z1[0]), z2[1].atan2(z2[0])),
    }
}

/// `Ξ^φ(e^{-iβ}, e^{iβ})` from the one-dimensional reduction.
pub fn xi_closed(phi: &TestKernel, beta: f64) -> f64 {
    if beta <= 0.0 {
        return 0.0;
    }
    let b2 = 2.0 * beta;
    if beta <= FRAC_PI_4 {
        8.0 * adaptive_split(|t| phi.phi(t) * (b2 - t) * t.sin(), 0.0, b2, &[FRAC_PI_4], TOL, TOL)
    } else {
        8.0 * adaptive_split(
            |t| phi.phi(t) * (b2 - t).min(PI - 2.0 * t) * t.sin(),
            0.0,
            FRAC_PI_2,
            &[FRAC_PI_4, PI - b2],
            TOL,
            TOL,
        )
    }
}

/// `dΞ/dβ = 16 ∫₀^{min(2β, π-2β)} φ(t) sin t dt`.
pub fn xi_closed_deriv(phi: &TestKernel, beta: f64) -> f64 {
    let top = (2.0 * beta).min(PI - 2.0 * beta).max(0.0);
    16.0 * adaptive_split(|t| phi.phi(t) * t.sin(), 0.0, top, &[FRAC_PI_4], TOL, TOL)
}

/// Signed pieces `(lo, hi, ±1)` of `1_{e^{it}·z2>0} - 1_{e^{it}·z1>0}` on one period.
pub(crate) fn indicator_difference(theta1: f64, theta2: f64) -> Vec<(f64, f64, f64)> {
    let start = theta1 - FRAC_PI_2;
    let mut cuts = vec![start, start + PI];
    for c in [theta2 - FRAC_PI_2, theta2 + FRAC_PI_2] {
        cuts.push(start + (c - start).rem_euclid(2.0 * PI));
    }
    cuts.push(start + 2.0 * PI);
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let ind = |t: f64, th: f64| if (t - th).cos() > 0.0 { 1.0 } else { 0.0 };
    let mut out = Vec::new();
    for w in cuts.windows(2) {
        if w[1] - w[0] <= 0.0 {
            continue;
        }
        let mid = 0.5 * (w[0] + w[1]);
        let d = ind(mid, theta2) - ind(mid, theta1);
        if d != 0.0 {
            out.push((w[0], w[1], d));
        }
    }
    out
}

/// The defining double integral, nested adaptive quadrature split at the
/// indicator jumps and at the kernel seams.
pub fn xi_double(phi: &TestKernel, theta1: f64, theta2: f64) -> f64 {
    let pieces = indicator_difference(theta1, theta2);
    let f = |u: f64| phi.phi(u) * u.sin();
    let mut parts = Vec::new();
    for &(a0, a1, sa) in &pieces {
        for &(b0, b1, sb) in &pieces {
            let outer = |s: f64| {
                let breaks = phi.seams_in(b0, b1, s);
                adaptive_split(|t| f(t - s), b0, b1, &breaks, 1e-14, 1e-13)
            };
            parts.push(sa * sb * adaptive_split(outer, a0, a1, &[], 1e-13, 1e-12));
        }
    }
    pairwise_sum(&parts)
}

/// `Ξ(β)` on a uniform β-grid with cubic Hermite interpolation.
#[derive(Debug, Clone)]
pub struct XiTable {
    step: f64,
    values: Vec<f64>,
    derivs: Vec<f64>,
}

impl XiTable {
    pub const DEFAULT_SIZE: usize = 2048;

    pub fn new(phi: &TestKernel, size: usize) -> Self {
        let step = FRAC_PI_2 / size as f64;
        let values = (0..=size).map(|i| xi_closed(phi, i as f64 * step)).collect();
        let derivs = (0..=size).map(|i| xi_closed_deriv(phi, i as f64 * step)).collect();
        Self { step, values, derivs }
    }

    pub fn eval(&self, beta: f64) -> f64 {
        let n = self.values.len() - 1;
        let x = (beta / self.step).clamp(0.0, n as f64);
        let k = (x.floor() as usize).min(n - 1);
        let t = x - k as f64;
        let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
        let h10 = t * (1.0 - t) * (1.0 - t);
        let h01 = t * t * (3.0 - 2.0 * t);
        let h11 = t * t * (t - 1.0);
        h00 * self.values[k]
            + h10 * self.step * self.derivs[k]
            + h01 * self.values[k + 1]
            + h11 * self.step * self.derivs[k + 1]
    }

    pub fn eval_pair(&self, z1: [f64; 2], z2: [f64; 2]) -> f64 {
        self.eval(half_separation(z1, z2))
    }
}

/// `ω_φ(t) = t ∫₀^{t/4} s φ(s) ds`.
pub fn omega(phi: &TestKernel, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if let (true, Some(g)) = (phi.is_pure_power() && t / 4.0 <= FRAC_PI_4, phi.gamma()) {
        return t.powf(g + 3.0) / ((g + 2.0) * 4f64.powf(g + 2.0));
    }
    t * adaptive_split(|s| s * phi.phi(s), 0.0, t / 4.0, &[FRAC_PI_4], 1e-15, 1e-13)
}

#[derive(Debug, Clone)]
pub struct CoercivityReport {
    /// `min_β Ξ(e^{-iβ}, e^{iβ}) / ω_φ(2 sin β)`.
    pub min_ratio: f64,
    pub argmin_beta: f64,
    /// `(β, Ξ, ω)` per grid point.
    pub samples: Vec<(f64, f64, f64)>,
}

/// Scans the β-grid; fails if `ω_φ` vanishes identically or the ratio is not positive.
pub fn coercivity_report(phi: &TestKernel, betas: &[f64]) -> Result<CoercivityReport> {
    if (1..=8).all(|k| omega(phi, k as f64 / 4.0) == 0.0) {
        return Err(Error::Degenerate("ω_φ vanishes identically".into()));
    }
    let mut samples = Vec::with_capacity(betas.len());
    let (mut min_ratio, mut argmin_beta) = (f64::INFINITY, f64::NAN);
    for &b in betas {
        let xi = xi_closed(phi, b);
        let w = omega(phi, 2.0 * b.sin());
        samples.push((b, xi, w));
        if w > 0.0 && xi / w < min_ratio {
            min_ratio = xi / w;
            argmin_beta = b;
        }
    }
    if !(min_ratio > 0.0 && min_ratio.is_finite()) {
        return Err(Error::Degenerate(format!("coercivity ratio {min_ratio} is not positive")));
    }
    Ok(CoercivityReport { min_ratio, argmin_beta, samples })
}

/// `n` points `kπ/(2n)`, `k = 1..=n`.
pub fn beta_grid(n: usize) -> Vec<f64> {
    (1..=n).map(|k| k as f64 * FRAC_PI_2 / n as f64).collect()
}
