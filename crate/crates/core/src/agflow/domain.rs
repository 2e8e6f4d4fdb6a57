use crate::error::{Error, Result};
use crate::gridcore::{Grid2, Mask};

/// Bounded convex domains for the continuation study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainKind {
    Disk { radius: f64 },
    Square { half: f64 },
    Ellipse { a: f64, b: f64 },
}

impl DomainKind {
    pub fn unit_disk() -> Self {
        Self::Disk { radius: 1.0 }
    }

    /// Parses `disk`, `square`, `ellipse` (unit-sized, ellipse semi-axes 1 and 0.6).
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "disk" => Ok(Self::unit_disk()),
            "square" => Ok(Self::Square { half: 1.0 }),
            "ellipse" => Ok(Self::Ellipse { a: 1.0, b: 0.6 }),
            _ => Err(Error::Config(format!("unknown domain `{name}`"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Disk { .. } => "disk",
            Self::Square { .. } => "square",
            Self::Ellipse { .. } => "ellipse",
        }
    }

    /// Half-width of the bounding box.
    pub fn extent(&self) -> f64 {
        match *self {
            Self::Disk { radius } => radius,
            Self::Square { half } => half,
            Self::Ellipse { a, b } => a.max(b),
        }
    }

    /// Nearest boundary point.
    pub fn closest_point(&self, p: [f64; 2]) -> [f64; 2] {
        match *self {
            Self::Disk { radius } => {
                let r = p[0].hypot(p[1]);
                if r == 0.0 {
                    [radius, 0.0]
                } else {
                    [radius * p[0] / r, radius * p[1] / r]
                }
            }
            Self::Square { half } => {
                let (ax, ay) = (p[0].abs(), p[1].abs());
                let q = if ax <= half && ay <= half {
                    // inside: project onto the nearest side
                    if half - ax <= half - ay {
                        [half, ay]
                    } else {
                        [ax, half]
                    }
                } else {
                    [ax.min(half), ay.min(half)]
                };
                [q[0].copysign(p[0]), q[1].copysign(p[1])]
            }
            Self::Ellipse { a, b } => ellipse_closest(a, b, p),
        }
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        match *self {
            Self::Disk { radius } => p[0].hypot(p[1]) < radius,
            Self::Square { half } => p[0].abs() < half && p[1].abs() < half,
            Self::Ellipse { a, b } => (p[0] / a).powi(2) + (p[1] / b).powi(2) < 1.0,
        }
    }

    /// Signed distance to the boundary, negative inside.
    pub fn signed_distance(&self, p: [f64; 2]) -> f64 {
        let q = self.closest_point(p);
        let d = (p[0] - q[0]).hypot(p[1] - q[1]);
        if self.contains(p) {
            -d
        } else {
            d
        }
    }

    /// Outward unit normal at the nearest boundary point.
    pub fn normal(&self, p: [f64; 2]) -> [f64; 2] {
        let q = self.closest_point(p);
        let (dx, dy) = (p[0] - q[0], p[1] - q[1]);
        let d = dx.hypot(dy);
        if d < 1e-14 {
            return self.boundary_normal(q);
        }
        let s = if self.contains(p) { -1.0 } else { 1.0 };
        [s * dx / d, s * dy / d]
    }

    /// `τ(π(x))`, the counterclockwise unit tangent `∇^⊥ d`.
    pub fn tangent(&self, p: [f64; 2]) -> [f64; 2] {
        let n = self.normal(p);
        [-n[1], n[0]]
    }

    fn boundary_normal(&self, q: [f64; 2]) -> [f64; 2] {
        let n = match *self {
            Self::Disk { .. } => q,
            Self::Square { half } => {
                if q[0].abs() >= half {
                    [q[0].signum(), 0.0]
                } else {
                    [0.0, q[1].signum()]
                }
            }
            Self::Ellipse { a, b } => [q[0] / (a * a), q[1] / (b * b)],
        };
        let r = n[0].hypot(n[1]);
        [n[0] / r, n[1] / r]
    }
}

/// Closest point on the ellipse `(x/a)² + (y/b)² = 1` by bisection on the
/// Lagrange parameter.
fn ellipse_closest(a: f64, b: f64, p: [f64; 2]) -> [f64; 2] {
    if a < b {
        let q = ellipse_closest(b, a, [p[1], p[0]]);
        return [q[1], q[0]];
    }
    let (y0, y1) = (p[0].abs(), p[1].abs());
    let (x0, x1) = if y1 > 0.0 {
        if y0 > 0.0 {
            let (z0, z1) = (y0 / a, y1 / b);
            let g = z0 * z0 + z1 * z1 - 1.0;
            if g != 0.0 {
                let r0 = (a / b) * (a / b);
                let s = bisect_root(r0, z0, z1, g);
                (r0 * y0 / (s + r0), y1 / (s + 1.0))
            } else {
                (y0, y1)
            }
        } else {
            (0.0, b)
        }
    } else {
        let (num, den) = (a * y0, a * a - b * b);
        if num < den {
            let t = num / den;
            (a * t, b * (1.0 - t * t).sqrt())
        } else {
            (a, 0.0)
        }
    };
    [x0.copysign(p[0]), x1.copysign(p[1])]
}

fn bisect_root(r0: f64, z0: f64, z1: f64, g: f64) -> f64 {
    let n0 = r0 * z0;
    let mut s0 = z1 - 1.0;
    let mut s1 = if g < 0.0 { 0.0 } else { n0.hypot(z1) - 1.0 };
    let mut s = s0;
    for _ in 0..1100 {
        s = 0.5 * (s0 + s1);
        if s == s0 || s == s1 {
            break;
        }
        let (q0, q1) = (n0 / (s + r0), z1 / (s + 1.0));
        let gs = q0 * q0 + q1 * q1 - 1.0;
        if gs > 0.0 {
            s0 = s;
        } else if gs < 0.0 {
            s1 = s;
        } else {
            break;
        }
    }
    s
}

/// A domain on a grid: `Ω`, the frozen outer layer `Ω_δ∖Ω`, and the signed distance.
#[derive(Debug, Clone)]
pub struct Domain {
    pub kind: DomainKind,
    pub grid: Grid2,
    pub omega: Mask,
    pub layer: Mask,
    /// Layer width in cells.
    pub delta_cells: usize,
}

impl Domain {
    /// `n × n` cells covering the domain, the layer and a two-cell margin.
    pub fn new(kind: DomainKind, n: usize, delta_cells: usize) -> Result<Self> {
        if delta_cells < 3 {
            return Err(Error::InvalidArgument(format!(
                "boundary layer must be at least 3 cells wide, got {delta_cells}"
            )));
        }
        let pad = delta_cells + 2;
        if n < 2 * pad + 8 {
            return Err(Error::InvalidGrid(format!("{n} cells cannot hold a {delta_cells}-cell layer")));
        }
        let ext = kind.extent();
        let h = 2.0 * ext / (n - 2 * pad) as f64;
        let lo = -ext - pad as f64 * h;
        let grid = Grid2::new(n, n, lo, lo, h, h)?;
        let delta = delta_cells as f64 * h;
        let omega = Mask::from_fn(&grid, |p| kind.contains(p));
        let layer = Mask::from_fn(&grid, |p| !kind.contains(p) && kind.signed_distance(p) <= delta);
        Ok(Self { kind, grid, omega, layer, delta_cells })
    }

    /// Cells carrying `u`.
    pub fn support(&self) -> Mask {
        self.omega.or(&self.layer)
    }

    /// Signed distance sampled at cell centers, NaN outside `Ω_δ`.
    pub fn distance_values(&self) -> Vec<f64> {
        let sup = self.support();
        (0..self.grid.len())
            .map(|k| if sup.get(k) { self.kind.signed_distance(self.grid.center_of(k)) } else { f64::NAN })
            .collect()
    }
}
