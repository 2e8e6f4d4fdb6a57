use super::field::{AngleField, ScalarField, VectorField2};
use super::grid::{Grid2, Mask};
use crate::error::{Error, Result};
use crate::quad::pairwise_sum;
use rayon::prelude::*;

/// Spatial displacement `h`: an exact cell offset, or an arbitrary vector
/// handled by bilinear sampling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Displacement {
    Cells(i64, i64),
    Offset([f64; 2]),
}

impl Displacement {
    pub fn vector(&self, grid: &Grid2) -> [f64; 2] {
        match *self {
            Self::Cells(i, j) => [i as f64 * grid.hx, j as f64 * grid.hy],
            Self::Offset(h) => h,
        }
    }

    pub fn negate(&self) -> Self {
        match *self {
            Self::Cells(i, j) => Self::Cells(-i, -j),
            Self::Offset(h) => Self::Offset([-h[0], -h[1]]),
        }
    }
}

/// `T^h f = f(· + h)` or `D^h f = T^h f - f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdMode {
    Difference,
    Translate,
}

/// Bilinear weights of the (up to) four cells around fractional coordinates.
fn bilinear_stencil(grid: &Grid2, mask: &Mask, p: [f64; 2]) -> Option<[(usize, f64); 4]> {
    let f = grid.locate(p);
    let mut out = [(0usize, 0.0f64); 4];
    let snap = |v: f64| {
        if (v - v.round()).abs() < 1e-9 {
            v.round()
        } else {
            v
        }
    };
    let fx = snap(f[0]);
    let fy = snap(f[1]);
    let i0 = fx.floor();
    let j0 = fy.floor();
    let tx = fx - i0;
    let ty = fy - j0;
    let mut n = 0;
    for (dj, wy) in [(0i64, 1.0 - ty), (1, ty)] {
        for (di, wx) in [(0i64, 1.0 - tx), (1, tx)] {
            let w = wx * wy;
            if w == 0.0 {
                continue;
            }
            let i = i0 as i64 + di;
            let j = j0 as i64 + dj;
            if !mask.at(i, j) {
                return None;
            }
            out[n] = (j as usize * grid.nx + i as usize, w);
            n += 1;
        }
    }
    let first = out[0].0;
    for slot in out.iter_mut().skip(n) {
        *slot = (first, 0.0);
    }
    Some(out)
}

/// Bilinear sample of a scalar field.
pub fn sample_scalar(f: &ScalarField, p: [f64; 2]) -> Option<f64> {
    let st = bilinear_stencil(&f.grid, &f.mask, p)?;
    Some(
        st.iter()
            .map(|&(k, w)| if w == 0.0 { 0.0 } else { w * f.values[k] })
            .sum(),
    )
}

/// Bilinear sample of `(cos θ, sin θ)`, renormalized to unit length.
pub fn sample_unit(m: &AngleField, p: [f64; 2]) -> Option<[f64; 2]> {
    let st = bilinear_stencil(&m.grid, &m.mask, p)?;
    let mut v = [0.0, 0.0];
    for &(k, w) in &st {
        if w != 0.0 {
            let e = m.m(k);
            v[0] += w * e[0];
            v[1] += w * e[1];
        }
    }
    let n = v[0].hypot(v[1]);
    if n < 1e-12 {
        return None;
    }
    Some([v[0] / n, v[1] / n])
}

fn shifted_index(grid: &Grid2, mask: &Mask, k: usize, di: i64, dj: i64) -> Option<usize> {
    let (i, j) = grid.ij(k);
    let t = grid.offset(i, j, di, dj)?;
    mask.get(t).then_some(t)
}

/// Finite difference or translation of a scalar field, defined on cells where
/// both `x` and `x + h` are available.
pub fn finite_difference(f: &ScalarField, h: Displacement, mode: FdMode) -> Result<ScalarField> {
    let g = f.grid;
    let hv = h.vector(&g);
    let mut out = vec![f64::NAN; g.len()];
    let mut mask = Mask::empty(&g);
    for k in 0..g.len() {
        if !f.mask.get(k) {
            continue;
        }
        let t = match h {
            Displacement::Cells(di, dj) => {
                shifted_index(&g, &f.mask, k, di, dj).map(|t| f.values[t])
            }
            Displacement::Offset(_) => {
                let c = g.center_of(k);
                sample_scalar(f, [c[0] + hv[0], c[1] + hv[1]])
            }
        };
        if let Some(t) = t {
            mask.cells[k] = true;
            out[k] = match mode {
                FdMode::Translate => t,
                FdMode::Difference => t - f.values[k],
            };
        }
    }
    if mask.count() == 0 {
        return Err(Error::EmptyRegion(
            "shrunk region of the finite difference".into(),
        ));
    }
    Ok(ScalarField {
        grid: g,
        mask,
        values: out,
    })
}

/// Finite difference of the embedded vectors `m = e^{iθ}` (never of angles).
/// With [`FdMode::Translate`] returns `T^h m`.
pub fn finite_difference_angle(
    m: &AngleField,
    h: Displacement,
    mode: FdMode,
) -> Result<VectorField2> {
    let g = m.grid;
    let hv = h.vector(&g);
    let mut u = vec![f64::NAN; g.len()];
    let mut v = vec![f64::NAN; g.len()];
    let mut mask = Mask::empty(&g);
    for k in 0..g.len() {
        if !m.mask.get(k) {
            continue;
        }
        let t = match h {
            Displacement::Cells(di, dj) => shifted_index(&g, &m.mask, k, di, dj).map(|t| m.m(t)),
            Displacement::Offset(_) => {
                let c = g.center_of(k);
                sample_unit(m, [c[0] + hv[0], c[1] + hv[1]])
            }
        };
        if let Some(t) = t {
            mask.cells[k] = true;
            let base = if mode == FdMode::Difference {
                m.m(k)
            } else {
                [0.0, 0.0]
            };
            u[k] = t[0] - base[0];
            v[k] = t[1] - base[1];
        }
    }
    if mask.count() == 0 {
        return Err(Error::EmptyRegion(
            "shrunk region of the finite difference".into(),
        ));
    }
    Ok(VectorField2 {
        grid: g,
        mask,
        u,
        v,
    })
}

/// Cell-sum integral of `f` over `region`.
pub fn integrate(f: &ScalarField, region: &Mask) -> f64 {
    let vals: Vec<f64> = (0..f.grid.len())
        .filter(|&k| region.get(k) && f.mask.get(k))
        .map(|k| f.values[k])
        .collect();
    pairwise_sum(&vals) * f.grid.cell_area()
}

/// `(Σ |f|^p hx hy)^{1/p}` over `region ∩ mask(f)`; `p = ∞` gives the max.
pub fn lp_norm(f: &ScalarField, p: f64, region: &Mask) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidArgument(format!("exponent {p} < 1")));
    }
    let vals: Vec<f64> = (0..f.grid.len())
        .filter(|&k| region.get(k) && f.mask.get(k))
        .map(|k| f.values[k].abs())
        .collect();
    if vals.is_empty() {
        return Err(Error::EmptyRegion("norm region".into()));
    }
    if p.is_infinite() {
        return Ok(vals.iter().fold(0.0, |a: f64, &b| a.max(b)));
    }
    let powered: Vec<f64> = vals.iter().map(|v| v.powf(p)).collect();
    Ok((pairwise_sum(&powered) * f.grid.cell_area()).powf(1.0 / p))
}

/// L^p norm of the pointwise Euclidean magnitude of a vector field.
pub fn lp_norm_vector(f: &VectorField2, p: f64, region: &Mask) -> Result<f64> {
    lp_norm(&f.magnitude(), p, region)
}

fn bump_weight(r2: f64) -> f64 {
    if r2 >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - r2)).exp()
    }
}

/// Convolution with a normalized radial bump of radius `width`, restricted to
/// unmasked cells (weights renormalized over the available neighbors).
pub fn mollify(f: &ScalarField, width: f64) -> Result<ScalarField> {
    let g = f.grid;
    if width < 2.0 * g.hx.max(g.hy) {
        return Err(Error::InvalidArgument(format!(
            "mollifier width {width} below two cells"
        )));
    }
    if width > (g.nx as f64 * g.hx).min(g.ny as f64 * g.hy) {
        return Err(Error::InvalidArgument(format!(
            "mollifier width {width} exceeds the domain"
        )));
    }
    let ri = (width / g.hx).ceil() as i64;
    let rj = (width / g.hy).ceil() as i64;
    let mut kernel = Vec::new();
    for dj in -rj..=rj {
        for di in -ri..=ri {
            let x = di as f64 * g.hx / width;
            let y = dj as f64 * g.hy / width;
            let w = bump_weight(x * x + y * y);
            if w > 0.0 {
                kernel.push((di, dj, w));
            }
        }
    }
    let mut values = vec![f64::NAN; g.len()];
    values
        .par_chunks_mut(g.nx)
        .enumerate()
        .for_each(|(j, row)| {
            for (i, out) in row.iter_mut().enumerate() {
                let k = g.idx(i, j);
                if !f.mask.get(k) {
                    continue;
                }
                let mut num = 0.0;
                let mut den = 0.0;
                for &(di, dj, w) in &kernel {
                    let (a, b) = (i as i64 + di, j as i64 + dj);
                    if f.mask.at(a, b) {
                        num += w * f.values[b as usize * g.nx + a as usize];
                        den += w;
                    }
                }
                *out = num / den;
            }
        });
    Ok(ScalarField {
        grid: g,
        mask: f.mask.clone(),
        values,
    })
}

/// `m_r(x) = m(r x)` sampled on `target`, by renormalized bilinear interpolation.
pub fn rescale_field(
    m: &AngleField,
    r: f64,
    target: &Grid2,
    target_mask: &Mask,
) -> Result<AngleField> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument("scale must be positive".into()));
    }
    let mut theta = vec![f64::NAN; target.len()];
    for k in 0..target.len() {
        if !target_mask.get(k) {
            continue;
        }
        let c = target.center_of(k);
        let p = [r * c[0], r * c[1]];
        let v = sample_unit(m, p).ok_or(Error::OutOfDomain { x: p[0], y: p[1] })?;
        theta[k] = v[1].atan2(v[0]);
    }
    let singular_points = m
        .singular_points
        .iter()
        .map(|s| [s[0] / r, s[1] / r])
        .collect();
    Ok(AngleField {
        grid: *target,
        mask: target_mask.clone(),
        theta,
        singular_points,
    })
}

/// Central-difference divergence on `region ∩ erode(mask(f))`.
pub fn divergence(f: &VectorField2, region: &Mask) -> Result<ScalarField> {
    let g = f.grid;
    let inner = f.mask.erode(1).and(region);
    if inner.count() == 0 {
        return Err(Error::EmptyRegion("region too small after erosion".into()));
    }
    let mut values = vec![f64::NAN; g.len()];
    values
        .par_chunks_mut(g.nx)
        .enumerate()
        .for_each(|(j, row)| {
            for (i, out) in row.iter_mut().enumerate() {
                let k = g.idx(i, j);
                if inner.get(k) {
                    let dx = (f.u[k + 1] - f.u[k - 1]) / (2.0 * g.hx);
                    let dy = (f.v[k + g.nx] - f.v[k - g.nx]) / (2.0 * g.hy);
                    *out = dx + dy;
                }
            }
        });
    Ok(ScalarField {
        grid: g,
        mask: inner,
        values,
    })
}

/// Central-difference scalar curl `∂₁f₂ - ∂₂f₁`.
pub fn curl(f: &VectorField2, region: &Mask) -> Result<ScalarField> {
    let g = f.grid;
    let inner = f.mask.erode(1).and(region);
    if inner.count() == 0 {
        return Err(Error::EmptyRegion("region too small after erosion".into()));
    }
    let mut values = vec![f64::NAN; g.len()];
    for k in 0..g.len() {
        if inner.get(k) {
            values[k] = (f.v[k + 1] - f.v[k - 1]) / (2.0 * g.hx)
                - (f.u[k + g.nx] - f.u[k - g.nx]) / (2.0 * g.hy);
        }
    }
    Ok(ScalarField {
        grid: g,
        mask: inner,
        values,
    })
}

/// Frobenius norm of the central-difference gradient of a vector field.
pub fn gradient_norm(f: &VectorField2, region: &Mask) -> Result<ScalarField> {
    let g = f.grid;
    let inner = f.mask.erode(1).and(region);
    if inner.count() == 0 {
        return Err(Error::EmptyRegion("region too small after erosion".into()));
    }
    let mut values = vec![f64::NAN; g.len()];
    for k in 0..g.len() {
        if inner.get(k) {
            let a = (f.u[k + 1] - f.u[k - 1]) / (2.0 * g.hx);
            let b = (f.u[k + g.nx] - f.u[k - g.nx]) / (2.0 * g.hy);
            let c = (f.v[k + 1] - f.v[k - 1]) / (2.0 * g.hx);
            let d = (f.v[k + g.nx] - f.v[k - g.nx]) / (2.0 * g.hy);
            values[k] = (a * a + b * b + c * c + d * d).sqrt();
        }
    }
    Ok(ScalarField {
        grid: g,
        mask: inner,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::super::canonical::{make_canonical_field, CanonicalKind};
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(g: &Grid2, seed: u64) -> ScalarField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vals = (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        ScalarField::new(*g, Mask::full(g), vals).unwrap()
    }

    #[test]
    fn difference_of_constant_vanishes() {
        let g = Grid2::square(0.0, 1.0, 16).unwrap();
        let f = ScalarField::constant(&g, &Mask::full(&g), 3.5);
        for h in [
            Displacement::Cells(3, -2),
            Displacement::Offset([0.07, 0.11]),
        ] {
            let d = finite_difference(&f, h, FdMode::Difference).unwrap();
            assert!(d
                .values
                .iter()
                .filter(|v| !v.is_nan())
                .all(|v| v.abs() < 1e-14));
        }
    }

    #[test]
    fn product_rule_holds_cellwise() {
        let g = Grid2::square(0.0, 1.0, 20).unwrap();
        let f = random_field(&g, 1);
        let gg = random_field(&g, 2);
        let fg = ScalarField::new(
            g,
            Mask::full(&g),
            f.values
                .iter()
                .zip(&gg.values)
                .map(|(a, b)| a * b)
                .collect(),
        )
        .unwrap();
        let h = Displacement::Cells(2, 1);
        let d_fg = finite_difference(&fg, h, FdMode::Difference).unwrap();
        let d_f = finite_difference(&f, h, FdMode::Difference).unwrap();
        let d_g = finite_difference(&gg, h, FdMode::Difference).unwrap();
        let t_g = finite_difference(&gg, h, FdMode::Translate).unwrap();
        for k in 0..g.len() {
            if d_fg.mask.get(k) {
                let rhs = f.values[k] * d_g.values[k] + t_g.values[k] * d_f.values[k];
                assert!((d_fg.values[k] - rhs).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn negative_shift_identity() {
        let g = Grid2::square(0.0, 1.0, 12).unwrap();
        let f = random_field(&g, 3);
        let dp = finite_difference(&f, Displacement::Cells(2, 1), FdMode::Difference).unwrap();
        let dm = finite_difference(&f, Displacement::Cells(-2, -1), FdMode::Difference).unwrap();
        for j in 1..g.ny {
            for i in 2..g.nx {
                let k = g.idx(i, j);
                let back = g.idx(i - 2, j - 1);
                assert_eq!(dm.values[k], -dp.values[back]);
            }
        }
    }

    #[test]
    fn norms_of_constants() {
        let g = Grid2::square(0.0, 1.0, 10).unwrap();
        let one = ScalarField::constant(&g, &Mask::full(&g), 1.0);
        for p in [1.0, 2.0, 3.5, f64::INFINITY] {
            assert!((lp_norm(&one, p, &Mask::full(&g)).unwrap() - 1.0).abs() < 1e-12);
        }
        let c = ScalarField::constant(&g, &Mask::full(&g), 2.0);
        let half = Mask::rect(&g, [0.0, 0.0], [0.5, 1.0]);
        let n = lp_norm(&c, 3.0, &half).unwrap();
        assert!((n - 2.0 * 0.5f64.powf(1.0 / 3.0)).abs() < 1e-12);
        assert!(lp_norm(&c, 0.5, &half).is_err());
    }

    #[test]
    fn norms_are_invariant_under_reflection() {
        let g = Grid2::square(0.0, 1.0, 16).unwrap();
        let f = random_field(&g, 9);
        let mut refl = f.clone();
        for j in 0..g.ny {
            for i in 0..g.nx {
                refl.values[g.idx(i, j)] = f.values[g.idx(g.nx - 1 - i, j)];
            }
        }
        let a = lp_norm(&f, 2.5, &Mask::full(&g)).unwrap();
        let b = lp_norm(&refl, 2.5, &Mask::full(&g)).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn mollify_keeps_constants_and_mass() {
        let g = Grid2::square(-1.0, 1.0, 64).unwrap();
        let c = ScalarField::constant(&g, &Mask::full(&g), 2.5);
        let mc = mollify(&c, 0.1).unwrap();
        assert!(mc.values.iter().all(|v| (v - 2.5).abs() < 1e-13));
        let f = ScalarField::from_fn(&g, &Mask::full(&g), |p| {
            if p[0].abs() < 0.3 && p[1].abs() < 0.4 {
                1.0 + p[0]
            } else {
                0.0
            }
        });
        let mf = mollify(&f, 0.15).unwrap();
        let full = Mask::full(&g);
        assert!((integrate(&mf, &full) - integrate(&f, &full)).abs() < 1e-12);
        assert!(mollify(&f, 0.01).is_err());
        assert!(mollify(&f, 5.0).is_err());
    }

    #[test]
    fn rescale_identity_and_vortex_invariance() {
        let g = Grid2::square(-2.0, 2.0, 64).unwrap();
        let m = make_canonical_field(CanonicalKind::SyntheticSmooth, &g, &Mask::full(&g)).unwrap();
        let t = Grid2::square(-1.0, 1.0, 32).unwrap();
        let same = rescale_field(&m, 1.0, &g, &m.mask).unwrap();
        for k in 0..g.len() {
            assert!((same.theta[k] - m.theta[k]).abs() < 1e-12);
        }
        let v = make_canonical_field(
            CanonicalKind::Vortex { center: [0.0, 0.0] },
            &g,
            &Mask::full(&g),
        )
        .unwrap();
        let vr = rescale_field(&v, 2.0, &t, &Mask::full(&t)).unwrap();
        let vt = make_canonical_field(
            CanonicalKind::Vortex { center: [0.0, 0.0] },
            &t,
            &Mask::full(&t),
        )
        .unwrap();
        for k in 0..t.len() {
            let p = t.center_of(k);
            if p[0].hypot(p[1]) > 0.3 {
                let a = vr.m(k);
                let b = vt.m(k);
                assert!((a[0] - b[0]).hypot(a[1] - b[1]) < 2e-3);
            }
        }
        assert!(rescale_field(&v, 4.0, &t, &Mask::full(&t)).is_err());
    }
}
