use super::grid::{Grid2, Mask};
use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Smooth step: 0 for u <= 0, 1 for u >= 1, C^∞ in between.
pub fn smooth_step(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / u).exp();
        let b = (-1.0 / (1.0 - u)).exp();
        a / (a + b)
    }
}

pub fn smooth_step_deriv(u: f64) -> f64 {
    if u <= 0.0 || u >= 1.0 {
        0.0
    } else {
        let a = (-1.0 / u).exp();
        let b = (-1.0 / (1.0 - u)).exp();
        let da = a / (u * u);
        let db = -b / ((1.0 - u) * (1.0 - u));
        (da * (a + b) - a * (da + db)) / ((a + b) * (a + b))
    }
}

/// Compactly supported test functions with values in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TestFunction {
    /// Equal to 1 for `r <= inner`, 0 for `r >= outer`.
    RadialBump {
        center: [f64; 2],
        inner: f64,
        outer: f64,
    },
    /// Ring: 1 for `r ∈ [r1, r2]`, smooth ramps of width `ramp` on both sides.
    RingBump {
        center: [f64; 2],
        r1: f64,
        r2: f64,
        ramp: f64,
    },
    /// Product of 1D plateaus `|x_k - c_k| <= inner_k`, support `< outer_k`.
    TensorBump {
        center: [f64; 2],
        inner: [f64; 2],
        outer: [f64; 2],
    },
    /// 1D bump on `(a, b)` with peak 1, of the form exp(1 - 1/(1-u²)).
    Bump1D { a: f64, b: f64 },
    /// 1D bump `sin^k(π(t-a)/(b-a))` on `(a, b)`.
    SinePower1D { a: f64, b: f64, k: i32 },
}

impl TestFunction {
    pub fn radial(center: [f64; 2], inner: f64, outer: f64) -> Result<Self> {
        if !(outer > inner && inner >= 0.0) {
            return Err(Error::InvalidArgument(
                "radial bump needs 0 <= inner < outer".into(),
            ));
        }
        Ok(Self::RadialBump {
            center,
            inner,
            outer,
        })
    }

    pub fn bump1d(a: f64, b: f64) -> Result<Self> {
        if !(b > a) {
            return Err(Error::InvalidArgument("1D bump needs a < b".into()));
        }
        Ok(Self::Bump1D { a, b })
    }

    /// Value at a point; 1D kinds read `p[0]`.
    pub fn value(&self, p: [f64; 2]) -> f64 {
        match *self {
            Self::RadialBump {
                center,
                inner,
                outer,
            } => {
                let r = (p[0] - center[0]).hypot(p[1] - center[1]);
                smooth_step((outer - r) / (outer - inner))
            }
            Self::RingBump {
                center,
                r1,
                r2,
                ramp,
            } => {
                let r = (p[0] - center[0]).hypot(p[1] - center[1]);
                smooth_step((r - (r1 - ramp)) / ramp) * smooth_step(((r2 + ramp) - r) / ramp)
            }
            Self::TensorBump {
                center,
                inner,
                outer,
            } => {
                let mut v = 1.0;
                for d in 0..2 {
                    v *= smooth_step((outer[d] - (p[d] - center[d]).abs()) / (outer[d] - inner[d]));
                }
                v
            }
            Self::Bump1D { a, b } => {
                let u = (2.0 * p[0] - a - b) / (b - a);
                if u.abs() >= 1.0 {
                    0.0
                } else {
                    (1.0 - 1.0 / (1.0 - u * u)).exp()
                }
            }
            Self::SinePower1D { a, b, k } => {
                if p[0] <= a || p[0] >= b {
                    0.0
                } else {
                    (PI * (p[0] - a) / (b - a)).sin().powi(k)
                }
            }
        }
    }

    /// Gradient; 1D kinds return `(f'(p[0]), 0)`.
    pub fn grad(&self, p: [f64; 2]) -> [f64; 2] {
        match *self {
            Self::RadialBump {
                center,
                inner,
                outer,
            } => {
                let dx = p[0] - center[0];
                let dy = p[1] - center[1];
                let r = dx.hypot(dy);
                if r == 0.0 {
                    return [0.0, 0.0];
                }
                let d = -smooth_step_deriv((outer - r) / (outer - inner)) / (outer - inner);
                [d * dx / r, d * dy / r]
            }
            Self::RingBump {
                center,
                r1,
                r2,
                ramp,
            } => {
                let dx = p[0] - center[0];
                let dy = p[1] - center[1];
                let r = dx.hypot(dy);
                if r == 0.0 {
                    return [0.0, 0.0];
                }
                let a = (r - (r1 - ramp)) / ramp;
                let b = ((r2 + ramp) - r) / ramp;
                let d = (smooth_step_deriv(a) * smooth_step(b)
                    - smooth_step(a) * smooth_step_deriv(b))
                    / ramp;
                [d * dx / r, d * dy / r]
            }
            Self::TensorBump {
                center,
                inner,
                outer,
            } => {
                let mut vals = [0.0; 2];
                let mut ders = [0.0; 2];
                for d in 0..2 {
                    let off = p[d] - center[d];
                    let w = outer[d] - inner[d];
                    let u = (outer[d] - off.abs()) / w;
                    vals[d] = smooth_step(u);
                    ders[d] = -smooth_step_deriv(u) * off.signum() / w;
                }
                [ders[0] * vals[1], vals[0] * ders[1]]
            }
            Self::Bump1D { a, b } => {
                let u = (2.0 * p[0] - a - b) / (b - a);
                if u.abs() >= 1.0 {
                    [0.0, 0.0]
                } else {
                    let q = 1.0 - u * u;
                    let v = (1.0 - 1.0 / q).exp();
                    [v * (-2.0 * u / (q * q)) * 2.0 / (b - a), 0.0]
                }
            }
            Self::SinePower1D { a, b, k } => {
                if p[0] <= a || p[0] >= b {
                    [0.0, 0.0]
                } else {
                    let w = PI / (b - a);
                    let arg = w * (p[0] - a);
                    [k as f64 * arg.sin().powi(k - 1) * arg.cos() * w, 0.0]
                }
            }
        }
    }

    /// Sup of the gradient magnitude, sampled on a fine polar/Cartesian scan.
    pub fn grad_sup(&self) -> f64 {
        let (lo, hi) = self.support_box();
        let n = 400;
        let mut best: f64 = 0.0;
        for j in 0..=n {
            for i in 0..=n {
                let p = [
                    lo[0] + (hi[0] - lo[0]) * i as f64 / n as f64,
                    lo[1] + (hi[1] - lo[1]) * j as f64 / n as f64,
                ];
                let g = self.grad(p);
                best = best.max(g[0].hypot(g[1]));
            }
        }
        best
    }

    /// Axis-aligned box containing the support.
    pub fn support_box(&self) -> ([f64; 2], [f64; 2]) {
        match *self {
            Self::RadialBump { center, outer, .. } => (
                [center[0] - outer, center[1] - outer],
                [center[0] + outer, center[1] + outer],
            ),
            Self::RingBump {
                center, r2, ramp, ..
            } => {
                let r = r2 + ramp;
                (
                    [center[0] - r, center[1] - r],
                    [center[0] + r, center[1] + r],
                )
            }
            Self::TensorBump { center, outer, .. } => (
                [center[0] - outer[0], center[1] - outer[1]],
                [center[0] + outer[0], center[1] + outer[1]],
            ),
            Self::Bump1D { a, b } | Self::SinePower1D { a, b, .. } => ([a, 0.0], [b, 0.0]),
        }
    }

    /// Mask of cells where the function or its gradient is nonzero.
    pub fn support_mask(&self, grid: &Grid2) -> Mask {
        Mask::from_fn(grid, |p| {
            let g = self.grad(p);
            self.value(p) != 0.0 || g[0] != 0.0 || g[1] != 0.0
        })
    }

    /// Checks that the support, and its translate by `(di, dj)` cells, lies in `region`.
    pub fn check_support(&self, grid: &Grid2, region: &Mask, shift: (i64, i64)) -> Result<()> {
        let supp = self.support_mask(grid);
        if supp.count() == 0 {
            return Err(Error::Support(
                "test function vanishes on every cell".into(),
            ));
        }
        for j in 0..grid.ny as i64 {
            for i in 0..grid.nx as i64 {
                let k = j as usize * grid.nx + i as usize;
                if supp.get(k) && !(region.get(k) && region.at(i + shift.0, j + shift.1)) {
                    return Err(Error::Support(format!("cell ({i}, {j}) leaves the region")));
                }
            }
        }
        // the bump must also vanish on the outermost ring of cells
        for i in 0..grid.nx {
            for j in [0, grid.ny - 1] {
                if supp.get(grid.idx(i, j)) {
                    return Err(Error::Support("support reaches the grid edge".into()));
                }
            }
        }
        for j in 0..grid.ny {
            for i in [0, grid.nx - 1] {
                if supp.get(grid.idx(i, j)) {
                    return Err(Error::Support("support reaches the grid edge".into()));
                }
            }
        }
        Ok(())
    }
}
