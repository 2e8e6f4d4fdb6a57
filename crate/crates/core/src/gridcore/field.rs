use super::grid::{Grid2, Mask};
use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Wraps an angle into `(-π, π]`.
#[inline]
pub fn wrap_angle(theta: f64) -> f64 {
    let mut t = theta % (2.0 * PI);
    if t <= -PI {
        t += 2.0 * PI;
    } else if t > PI {
        t -= 2.0 * PI;
    }
    t
}

/// Scalar values on unmasked cells; masked cells hold NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: Grid2,
    pub mask: Mask,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn from_fn<F: Fn([f64; 2]) -> f64>(grid: &Grid2, mask: &Mask, f: F) -> Self {
        let values = (0..grid.len())
            .map(|k| {
                if mask.get(k) {
                    f(grid.center_of(k))
                } else {
                    f64::NAN
                }
            })
            .collect();
        Self {
            grid: *grid,
            mask: mask.clone(),
            values,
        }
    }

    pub fn constant(grid: &Grid2, mask: &Mask, c: f64) -> Self {
        Self::from_fn(grid, mask, |_| c)
    }

    pub fn new(grid: Grid2, mask: Mask, mut values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() || mask.cells.len() != grid.len() {
            return Err(Error::InvalidArgument(
                "field size does not match grid".into(),
            ));
        }
        for (k, v) in values.iter_mut().enumerate() {
            if mask.get(k) {
                if !v.is_finite() {
                    return Err(Error::InvalidArgument(format!(
                        "non-finite value at cell {k}"
                    )));
                }
            } else {
                *v = f64::NAN;
            }
        }
        Ok(Self { grid, mask, values })
    }

    pub fn restrict(&self, mask: &Mask) -> ScalarField {
        let m = self.mask.and(mask);
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(k, &v)| if m.get(k) { v } else { f64::NAN })
            .collect();
        ScalarField {
            grid: self.grid,
            mask: m,
            values,
        }
    }
}

/// A unit vector field `m = (cos θ, sin θ)` stored by its angle.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleField {
    pub grid: Grid2,
    pub mask: Mask,
    pub theta: Vec<f64>,
    /// Points where the field is singular (e.g. a vortex center); operations
    /// that differentiate excise a small disk around each.
    pub singular_points: Vec<[f64; 2]>,
}

impl AngleField {
    pub fn from_fn<F: Fn([f64; 2]) -> f64>(grid: &Grid2, mask: &Mask, f: F) -> Self {
        let theta = (0..grid.len())
            .map(|k| {
                if mask.get(k) {
                    wrap_angle(f(grid.center_of(k)))
                } else {
                    f64::NAN
                }
            })
            .collect();
        Self {
            grid: *grid,
            mask: mask.clone(),
            theta,
            singular_points: Vec::new(),
        }
    }

    pub fn new(grid: Grid2, mask: Mask, theta: Vec<f64>) -> Result<Self> {
        let s = ScalarField::new(grid, mask, theta)?;
        let theta = s
            .values
            .into_iter()
            .map(|t| if t.is_nan() { t } else { wrap_angle(t) })
            .collect();
        Ok(Self {
            grid,
            mask: s.mask,
            theta,
            singular_points: Vec::new(),
        })
    }

    #[inline]
    pub fn m(&self, k: usize) -> [f64; 2] {
        let t = self.theta[k];
        [t.cos(), t.sin()]
    }

    pub fn to_vector(&self) -> VectorField2 {
        let mut u = vec![f64::NAN; self.grid.len()];
        let mut v = vec![f64::NAN; self.grid.len()];
        for k in 0..self.grid.len() {
            if self.mask.get(k) {
                let m = self.m(k);
                u[k] = m[0];
                v[k] = m[1];
            }
        }
        VectorField2 {
            grid: self.grid,
            mask: self.mask.clone(),
            u,
            v,
        }
    }

    /// Angle of a vector field; zero vectors are rejected.
    pub fn from_vector(f: &VectorField2) -> Result<Self> {
        let mut theta = vec![f64::NAN; f.grid.len()];
        for k in 0..f.grid.len() {
            if f.mask.get(k) {
                if f.u[k] == 0.0 && f.v[k] == 0.0 {
                    return Err(Error::Degenerate(format!("zero vector at cell {k}")));
                }
                theta[k] = f.v[k].atan2(f.u[k]);
            }
        }
        Ok(Self {
            grid: f.grid,
            mask: f.mask.clone(),
            theta,
            singular_points: Vec::new(),
        })
    }

    /// Mask of cells at distance >= `radius` from every singular point.
    pub fn regular_mask(&self, radius: f64) -> Mask {
        let pts = &self.singular_points;
        let keep = Mask::from_fn(&self.grid, |p| {
            pts.iter()
                .all(|c| (p[0] - c[0]).hypot(p[1] - c[1]) >= radius)
        });
        self.mask.and(&keep)
    }
}

/// Two-component field; used for non-unit fields and fluxes.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField2 {
    pub grid: Grid2,
    pub mask: Mask,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl VectorField2 {
    pub fn from_fn<F: Fn([f64; 2]) -> [f64; 2]>(grid: &Grid2, mask: &Mask, f: F) -> Self {
        let mut u = vec![f64::NAN; grid.len()];
        let mut v = vec![f64::NAN; grid.len()];
        for k in 0..grid.len() {
            if mask.get(k) {
                let w = f(grid.center_of(k));
                u[k] = w[0];
                v[k] = w[1];
            }
        }
        Self {
            grid: *grid,
            mask: mask.clone(),
            u,
            v,
        }
    }

    pub fn new(grid: Grid2, mask: Mask, u: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        let a = ScalarField::new(grid, mask.clone(), u)?;
        let b = ScalarField::new(grid, mask, v)?;
        Ok(Self {
            grid,
            mask: a.mask,
            u: a.values,
            v: b.values,
        })
    }

    #[inline]
    pub fn at(&self, k: usize) -> [f64; 2] {
        [self.u[k], self.v[k]]
    }

    /// Pointwise Euclidean magnitude.
    pub fn magnitude(&self) -> ScalarField {
        let values = self
            .u
            .iter()
            .zip(&self.v)
            .map(|(a, b)| a.hypot(*b))
            .collect();
        ScalarField {
            grid: self.grid,
            mask: self.mask.clone(),
            values,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_into_half_open_interval() {
        assert_eq!(wrap_angle(PI), PI);
        assert_eq!(wrap_angle(-PI), PI);
        assert!((wrap_angle(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_angle(-0.5) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn unit_length_by_construction() {
        let g = Grid2::square(-1.0, 1.0, 8).unwrap();
        let f = AngleField::from_fn(&g, &Mask::full(&g), |p| 7.0 * p[0] + 3.0 * p[1]);
        for k in 0..g.len() {
            let m = f.m(k);
            assert!((m[0].hypot(m[1]) - 1.0).abs() < 1e-15);
            assert!(f.theta[k] > -PI && f.theta[k] <= PI);
        }
    }

    #[test]
    fn rejects_non_finite_unmasked_values() {
        let g = Grid2::square(0.0, 1.0, 4).unwrap();
        let mut vals = vec![0.0; 16];
        vals[3] = f64::INFINITY;
        assert!(ScalarField::new(g, Mask::full(&g), vals).is_err());
    }
}
