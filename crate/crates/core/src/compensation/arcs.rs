//! Continuum `A^τ` for indicator data through primitives of `φ cos` and `φ sin`.

use super::kernel::TestKernel;
use super::xi::indicator_difference;
use crate::quad::{adaptive_split, GaussLegendre};
use std::f64::consts::{FRAC_PI_2, PI};

const TWO_PI: f64 = 2.0 * PI;

/// `C_c(u) = ∫₀^u φ(v) cos v dv` and `C_s(u) = ∫₀^u φ(v) sin v dv`, tabulated on
/// `[0, 2π]` with cubic Hermite interpolation. Kernel seams fall on nodes.
#[derive(Debug, Clone)]
pub(crate) struct KernelPrimitives {
    phi: TestKernel,
    h: f64,
    cc: Vec<f64>,
    cs: Vec<f64>,
}

impl KernelPrimitives {
    pub const DEFAULT_SIZE: usize = 8192;

    pub fn new(phi: &TestKernel, size: usize) -> Self {
        let n = size.div_ceil(8) * 8;
        let h = TWO_PI / n as f64;
        let gl = GaussLegendre::new(16);
        let mut cc = vec![0.0; n + 1];
        let mut cs = vec![0.0; n + 1];
        for k in 0..n {
            let (a, b) = (k as f64 * h, (k + 1) as f64 * h);
            cc[k + 1] = cc[k] + gl.integrate(a, b, 1, |v| phi.phi(v) * v.cos());
            cs[k + 1] = cs[k] + gl.integrate(a, b, 1, |v| phi.phi(v) * v.sin());
        }
        Self { phi: *phi, h, cc, cs }
    }

    fn interp(&self, table: &[f64], deriv: impl Fn(f64) -> f64, u: f64) -> f64 {
        let q = (u / TWO_PI).floor();
        let r = u - q * TWO_PI;
        let n = table.len() - 1;
        let k = ((r / self.h) as usize).min(n - 1);
        let (a, b) = (k as f64 * self.h, (k + 1) as f64 * self.h);
        let t = (r - a) / self.h;
        let d0 = deriv(a) * self.h;
        let d1 = deriv(b) * self.h;
        let (t2, t3) = (t * t, t * t * t);
        let v = (2.0 * t3 - 3.0 * t2 + 1.0) * table[k]
            + (t3 - 2.0 * t2 + t) * d0
            + (-2.0 * t3 + 3.0 * t2) * table[k + 1]
            + (t3 - t2) * d1;
        v + q * table[n]
    }

    pub fn c_cos(&self, u: f64) -> f64 {
        self.interp(&self.cc, |v| self.phi.phi(v) * v.cos(), u)
    }

    pub fn c_sin(&self, u: f64) -> f64 {
        self.interp(&self.cs, |v| self.phi.phi(v) * v.sin(), u)
    }

    /// `∫_{arc(θ)} φ(t - s) sin t dt = sin s · Φc + cos s · Φs`.
    fn arc_sin_weight(&self, theta: f64, s: f64) -> f64 {
        let (hi, lo) = (theta + FRAC_PI_2 - s, theta - FRAC_PI_2 - s);
        let fc = self.c_cos(hi) - self.c_cos(lo);
        let fs = self.c_sin(hi) - self.c_sin(lo);
        s.sin() * fc + s.cos() * fs
    }

    /// `(A₁, A₂)` at one cell with `θ⁰ = θ(x)` and `θ¹ = θ(x + τe₁)`.
    pub fn a_pair(&self, theta0: f64, theta1: f64) -> [f64; 2] {
        let pieces = indicator_difference(theta0, theta1);
        let mut a = [0.0; 2];
        for &(lo, hi, sign) in &pieces {
            let mut breaks = self.phi.seams_in(lo, hi, theta1 + FRAC_PI_2);
            breaks.extend(self.phi.seams_in(lo, hi, theta1 - FRAC_PI_2));
            let f1 = |s: f64| s.cos() * self.arc_sin_weight(theta1, s);
            a[0] += sign * adaptive_split(f1, lo, hi, &breaks, 1e-13, 1e-11);
            let mut breaks = self.phi.seams_in(lo, hi, theta0 + FRAC_PI_2);
            breaks.extend(self.phi.seams_in(lo, hi, theta0 - FRAC_PI_2));
            let f2 = |s: f64| s.sin() * self.arc_sin_weight(theta0, s);
            a[1] += sign * adaptive_split(f2, lo, hi, &breaks, 1e-13, 1e-11);
        }
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primitives_match_quadrature() {
        let phi = TestKernel::power(3.0).unwrap();
        let p = KernelPrimitives::new(&phi, 4096);
        for u in [0.1, std::f64::consts::FRAC_PI_4 - 1e-7, 1.3, 2.9, 4.0, 6.2, 7.5, -1.1] {
            let (lo, hi) = if u >= 0.0 { (0.0, u) } else { (u, 0.0) };
            let sg = if u >= 0.0 { 1.0 } else { -1.0 };
            let br = phi.seams_in(lo, hi, 0.0);
            let c = sg * adaptive_split(|v| phi.phi(v) * v.cos(), lo, hi, &br, 1e-14, 1e-13);
            let s = sg * adaptive_split(|v| phi.phi(v) * v.sin(), lo, hi, &br, 1e-14, 1e-13);
            assert!((p.c_cos(u) - c).abs() < 1e-10, "u={u}");
            assert!((p.c_sin(u) - s).abs() < 1e-10, "u={u}");
        }
    }

    #[test]
    fn equal_angles_give_zero() {
        let phi = TestKernel::sin2();
        let p = KernelPrimitives::new(&phi, 1024);
        assert_eq!(p.a_pair(0.4, 0.4), [0.0, 0.0]);
    }
}
