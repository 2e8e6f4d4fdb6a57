use crate::error::{Error, Result};
use crate::quad::{gl_split, GaussLegendre};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

/// Default regularization for exponents `γ <= 1`.
pub const DEFAULT_EPS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Shape {
    /// `t^γ` on `(0, π/4]`; `eps > 0` selects `(t² + ε²)^{(γ-1)/2} t`.
    Power { gamma: f64, eps: f64 },
    Sin2,
}

/// An odd, π-periodic kernel `φ`, nonnegative on `(0, π/2)`.
///
/// The power family uses `t^γ` on `(0, π/4]` and a cubic Hermite bridge on
/// `[π/4, π/2]` that ends at zero with slope equal to minus the start slope,
/// so the odd π-periodic extension is C¹ away from the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestKernel {
    shape: Shape,
    // bridge data: value and slope at π/4
    a: f64,
    g: f64,
}

impl TestKernel {
    /// Power kernel; exponents `γ <= 1` are regularized with [`DEFAULT_EPS`].
    pub fn power(gamma: f64) -> Result<Self> {
        Self::power_eps(gamma, if gamma <= 1.0 { DEFAULT_EPS } else { 0.0 })
    }

    pub fn power_eps(gamma: f64, eps: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidArgument(format!("kernel exponent γ = {gamma} must be positive")));
        }
        if eps < 0.0 {
            return Err(Error::InvalidArgument("ε must be nonnegative".into()));
        }
        let shape = Shape::Power { gamma, eps };
        let (a, g) = (core_value(shape, FRAC_PI_4), core_deriv(shape, FRAC_PI_4));
        Ok(Self { shape, a, g })
    }

    /// Kernel with `γ = 3p - 3`.
    pub fn for_p(p: f64) -> Result<Self> {
        Self::power(3.0 * p - 3.0)
    }

    pub fn sin2() -> Self {
        Self { shape: Shape::Sin2, a: 0.0, g: 0.0 }
    }

    /// Parses `sin2`, `gamma=<γ>` or a bare number.
    pub fn from_name(name: &str) -> Result<Self> {
        if name == "sin2" {
            return Ok(Self::sin2());
        }
        let v = name.strip_prefix("gamma=").unwrap_or(name);
        let g: f64 = v.parse().map_err(|_| Error::Config(format!("unknown kernel `{name}`")))?;
        Self::power(g)
    }

    pub fn name(&self) -> String {
        match self.shape {
            Shape::Power { gamma, .. } => format!("gamma={gamma}"),
            Shape::Sin2 => "sin2".into(),
        }
    }

    pub fn gamma(&self) -> Option<f64> {
        match self.shape {
            Shape::Power { gamma, .. } => Some(gamma),
            Shape::Sin2 => None,
        }
    }

    pub fn eps(&self) -> f64 {
        match self.shape {
            Shape::Power { eps, .. } => eps,
            Shape::Sin2 => 0.0,
        }
    }

    /// Whether `φ(t) = t^γ` exactly on `(0, π/4]`.
    pub fn is_pure_power(&self) -> bool {
        matches!(self.shape, Shape::Power { eps, .. } if eps == 0.0)
    }

    /// Points in `[0, π)` where the kernel may lose smoothness.
    pub fn seams(&self) -> &'static [f64] {
        const S: [f64; 4] = [0.0, FRAC_PI_4, FRAC_PI_2, 3.0 * FRAC_PI_4];
        match self.shape {
            Shape::Power { .. } => &S,
            Shape::Sin2 => &[],
        }
    }

    /// Seam points (modulo π) inside `[lo, hi]`.
    pub fn seams_in(&self, lo: f64, hi: f64, shift: f64) -> Vec<f64> {
        let mut out = Vec::new();
        for &s in self.seams() {
            let mut k = ((lo - shift - s) / PI).floor();
            loop {
                let p = shift + s + k * PI;
                if p > hi {
                    break;
                }
                if p >= lo {
                    out.push(p);
                }
                k += 1.0;
            }
        }
        out
    }

    pub fn phi(&self, t: f64) -> f64 {
        if let Shape::Sin2 = self.shape {
            return (2.0 * t).sin();
        }
        let (r, sign) = reduce(t);
        sign * self.half(r)
    }

    pub fn dphi(&self, t: f64) -> f64 {
        if let Shape::Sin2 = self.shape {
            return 2.0 * (2.0 * t).cos();
        }
        let (r, _) = reduce(t);
        self.half_deriv(r)
    }

    fn half(&self, r: f64) -> f64 {
        if r <= FRAC_PI_4 {
            core_value(self.shape, r)
        } else {
            let u = (r - FRAC_PI_4) / FRAC_PI_4;
            self.a * (1.0 - u) * (1.0 - u) * (1.0 + 2.0 * u) + self.g * FRAC_PI_4 * u * (1.0 - u)
        }
    }

    fn half_deriv(&self, r: f64) -> f64 {
        if r <= FRAC_PI_4 {
            core_deriv(self.shape, r)
        } else {
            let u = (r - FRAC_PI_4) / FRAC_PI_4;
            (-6.0 * self.a * u * (1.0 - u)) / FRAC_PI_4 + self.g * (1.0 - 2.0 * u)
        }
    }

    /// `‖φ‖_{L¹(𝕋)}`.
    pub fn l1_norm(&self) -> f64 {
        4.0 * gl_split(GaussLegendre::g20(), |t| self.phi(t), 0.0, FRAC_PI_2, &[FRAC_PI_4], 16)
    }

    /// `‖φ′‖_{L¹(𝕋)}`.
    pub fn dphi_l1_norm(&self) -> f64 {
        4.0 * gl_split(GaussLegendre::g20(), |t| self.dphi(t).abs(), 0.0, FRAC_PI_2, &self.dphi_roots(), 16)
    }

    // sign changes of φ′ on (0, π/2), so |φ′| is integrated piecewise smoothly
    fn dphi_roots(&self) -> Vec<f64> {
        match self.shape {
            Shape::Sin2 => vec![FRAC_PI_4],
            Shape::Power { .. } => {
                // roots of the bridge derivative, bracketed numerically
                let mut out = vec![FRAC_PI_4];
                let n = 400;
                let f = |k: usize| self.half_deriv(FRAC_PI_4 + FRAC_PI_4 * k as f64 / n as f64);
                for k in 0..n {
                    if f(k) * f(k + 1) < 0.0 {
                        let (mut lo, mut hi) = (k as f64 / n as f64, (k + 1) as f64 / n as f64);
                        for _ in 0..60 {
                            let mid = 0.5 * (lo + hi);
                            let v = self.half_deriv(FRAC_PI_4 * (1.0 + mid));
                            if v * self.half_deriv(FRAC_PI_4 * (1.0 + lo)) <= 0.0 {
                                hi = mid;
                            } else {
                                lo = mid;
                            }
                        }
                        out.push(FRAC_PI_4 * (1.0 + 0.5 * (lo + hi)));
                    }
                }
                out
            }
        }
    }

    /// Sampled checks of oddness, π-periodicity, sign, and C¹ seams.
    pub fn check_invariants(&self) -> Result<()> {
        let n = 997;
        let scale = self.a.abs().max(1.0);
        for k in 0..n {
            let t = -7.0 + 14.0 * k as f64 / n as f64;
            if (self.phi(-t) + self.phi(t)).abs() > 1e-12 * scale {
                return Err(Error::Degenerate(format!("kernel not odd at t = {t}")));
            }
            if (self.phi(t + PI) - self.phi(t)).abs() > 1e-12 * scale {
                return Err(Error::Degenerate(format!("kernel not π-periodic at t = {t}")));
            }
            let u = FRAC_PI_2 * (k as f64 + 0.5) / n as f64;
            if self.phi(u) < 0.0 {
                return Err(Error::Degenerate(format!("kernel negative at t = {u}")));
            }
        }
        if self.phi(FRAC_PI_2).abs() > 1e-12 * scale {
            return Err(Error::Degenerate("φ(π/2) ≠ 0".into()));
        }
        let h = 1e-7;
        for seam in [FRAC_PI_4, FRAC_PI_2] {
            let left = (self.phi(seam) - self.phi(seam - h)) / h;
            let right = (self.phi(seam + h) - self.phi(seam)) / h;
            if (left - right).abs() > 1e-6 * scale.max(self.g.abs()) {
                return Err(Error::Degenerate(format!("kernel not C¹ at {seam}: {left} vs {right}")));
            }
        }
        Ok(())
    }
}

/// Reduces `t` modulo π to `r ∈ [0, π/2]` with `φ(t) = sign·φ(r)`.
#[inline]
fn reduce(t: f64) -> (f64, f64) {
    let mut r = t.rem_euclid(PI);
    let mut sign = 1.0;
    if r > FRAC_PI_2 {
        r = PI - r;
        sign = -1.0;
    }
    (r, sign)
}

fn core_value(shape: Shape, t: f64) -> f64 {
    match shape {
        Shape::Power { gamma, eps } if eps > 0.0 => (t * t + eps * eps).powf(0.5 * (gamma - 1.0)) * t,
        Shape::Power { gamma, .. } => t.powf(gamma),
        Shape::Sin2 => (2.0 * t).sin(),
    }
}

fn core_deriv(shape: Shape, t: f64) -> f64 {
    match shape {
        Shape::Power { gamma, eps } if eps > 0.0 => {
            (t * t + eps * eps).powf(0.5 * (gamma - 3.0)) * (gamma * t * t + eps * eps)
        }
        Shape::Power { gamma, .. } => {
            if t == 0.0 {
                if gamma > 1.0 {
                    0.0
                } else if gamma == 1.0 {
                    1.0
                } else {
                    f64::INFINITY
                }
            } else {
                gamma * t.powf(gamma - 1.0)
            }
        }
        Shape::Sin2 => 2.0 * (2.0 * t).cos(),
    }
}
