use super::field::AngleField;
use super::grid::{Grid2, Mask};
use crate::error::{Error, Result};
use std::f64::consts::FRAC_PI_2;

/// Orientation of a straight wall.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    /// Wall along the line `x = offset`; normal `e₁`.
    Vertical,
    /// Wall along the line `y = offset`; normal `e₂`.
    Horizontal,
}

/// Closed-form fields used as test cases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CanonicalKind {
    Constant {
        theta0: f64,
    },
    /// `θ(x) = angle(x - center) + π/2`, the counterclockwise vortex.
    Vortex {
        center: [f64; 2],
    },
    /// Sharp wall: tangential component `±sin α`, normal component `cos α`.
    Wall {
        alpha: f64,
        axis: Axis,
        offset: f64,
    },
    /// Wall whose tangential component follows `sin α · tanh(d / width)`.
    MollifiedWall {
        alpha: f64,
        axis: Axis,
        offset: f64,
        width: f64,
    },
    /// A fixed smooth, non-solution angle field.
    SyntheticSmooth,
}

impl CanonicalKind {
    fn validate(&self) -> Result<()> {
        match *self {
            Self::Wall { alpha, .. } | Self::MollifiedWall { alpha, .. }
                if !(0.0..=FRAC_PI_2).contains(&alpha) =>
            {
                Err(Error::InvalidArgument(format!(
                    "wall angle {alpha} outside [0, π/2]"
                )))
            }
            Self::MollifiedWall { width, .. } if width <= 0.0 => Err(Error::InvalidArgument(
                "mollified wall needs a positive width".into(),
            )),
            _ => Ok(()),
        }
    }

    /// Unit vector at a point (not wrapped through the angle).
    pub fn vector_at(&self, p: [f64; 2]) -> [f64; 2] {
        match *self {
            Self::Wall {
                alpha,
                axis,
                offset,
            } => {
                let (d, _) = split(axis, p, offset);
                let t = if d >= 0.0 { alpha.sin() } else { -alpha.sin() };
                assemble(axis, alpha.cos(), t)
            }
            Self::MollifiedWall {
                alpha,
                axis,
                offset,
                width,
            } => {
                let (d, _) = split(axis, p, offset);
                let t = alpha.sin() * (d / width).tanh();
                assemble(axis, (1.0 - t * t).max(0.0).sqrt(), t)
            }
            _ => {
                let a = self.angle_at(p);
                [a.cos(), a.sin()]
            }
        }
    }

    /// Angle at a point, not wrapped.
    pub fn angle_at(&self, p: [f64; 2]) -> f64 {
        match *self {
            Self::Constant { theta0 } => theta0,
            Self::Vortex { center } => (p[1] - center[1]).atan2(p[0] - center[0]) + FRAC_PI_2,
            Self::Wall { .. } | Self::MollifiedWall { .. } => {
                let v = self.vector_at(p);
                v[1].atan2(v[0])
            }
            Self::SyntheticSmooth => 0.6 * (1.3 * p[0] + 0.4).sin() * (0.9 * p[1]).cos() + 0.2,
        }
    }

    /// Whether the field is smooth enough for derivative-based operations.
    pub fn is_smooth(&self) -> bool {
        !matches!(self, Self::Wall { .. })
    }
}

fn split(axis: Axis, p: [f64; 2], offset: f64) -> (f64, f64) {
    match axis {
        Axis::Vertical => (p[0] - offset, p[1]),
        Axis::Horizontal => (p[1] - offset, p[0]),
    }
}

fn assemble(axis: Axis, normal: f64, tangential: f64) -> [f64; 2] {
    match axis {
        Axis::Vertical => [normal, tangential],
        Axis::Horizontal => [tangential, normal],
    }
}

/// Samples a canonical field at the cell centers of `mask`.
pub fn make_canonical_field(kind: CanonicalKind, grid: &Grid2, mask: &Mask) -> Result<AngleField> {
    kind.validate()?;
    if let CanonicalKind::Vortex { center } = kind {
        let (lo, hi) = grid.extent();
        if !(center[0] > lo[0] && center[0] < hi[0] && center[1] > lo[1] && center[1] < hi[1]) {
            return Err(Error::InvalidArgument(
                "vortex center outside the domain".into(),
            ));
        }
        let tol = 1e-12 * grid.hx.min(grid.hy);
        for k in 0..grid.len() {
            let c = grid.center_of(k);
            if mask.get(k) && (c[0] - center[0]).hypot(c[1] - center[1]) <= tol {
                return Err(Error::InvalidArgument(
                    "vortex center coincides with a cell center; shift the grid".into(),
                ));
            }
        }
    }
    let mut f = match kind {
        CanonicalKind::Wall { .. } | CanonicalKind::MollifiedWall { .. } => {
            AngleField::from_fn(grid, mask, |p| {
                let v = kind.vector_at(p);
                v[1].atan2(v[0])
            })
        }
        _ => AngleField::from_fn(grid, mask, |p| kind.angle_at(p)),
    };
    if let CanonicalKind::Vortex { center } = kind {
        f.singular_points.push(center);
    }
    Ok(f)
}

/// Default vortex-core excision radius in cells.
pub const DEFAULT_CORE_CELLS: f64 = 4.0;
