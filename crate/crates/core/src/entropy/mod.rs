//! Entropies `Φ: 𝕊¹ → ℝ²`, their generators, and entropy productions.
//!
//! An entropy is stored as `κ·Φ₀` where `Φ₀` is either one of the closed
//! forms below or the half-circle integral of a generator `ψ`:
//!
//! ```text
//! Φ^ψ(w) = ∫_{w·e^{is} > 0} ψ(s) e^{is} ds
//! ```

mod torus;

pub use torus::TorusFunction;

use crate::error::{Error, Result};
use crate::gridcore::{
    divergence, lp_norm, rescale_field, AngleField, Grid2, Mask, ScalarField, VectorField2,
    DEFAULT_CORE_CELLS,
};
use crate::quad::GaussLegendre;
use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

/// Normalization making the wall production equal the optimal wall energy.
pub const DEFAULT_KAPPA: f64 = 0.5;

const MOMENT_TOL: f64 = 1e-10;

/// Closed-form entropies (for `κ = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedForm {
    Identity,
    /// `e^{-iθ} - ⅓e^{3iθ}`, generator `cos 2s`.
    Jk1,
    /// `ie^{-iθ} + (i/3)e^{3iθ}`, generator `sin 2s`.
    Jk2,
    /// First row of the conformal-anticonformal matrix as printed: `e^{-iθ} + ⅓e^{3iθ}`.
    Jk1Literal,
    /// Second row as printed: `ie^{-iθ} - (i/3)e^{3iθ}`.
    Jk2Literal,
}

impl ClosedForm {
    pub fn value(&self, theta: f64) -> [f64; 2] {
        let (c, s) = (theta.cos(), theta.sin());
        let (c3, s3) = ((3.0 * theta).cos(), (3.0 * theta).sin());
        match self {
            Self::Identity => [c, s],
            Self::Jk1 => [c - c3 / 3.0, -s - s3 / 3.0],
            Self::Jk2 => [s - s3 / 3.0, c + c3 / 3.0],
            Self::Jk1Literal => [c + c3 / 3.0, -s + s3 / 3.0],
            Self::Jk2Literal => [s + s3 / 3.0, c - c3 / 3.0],
        }
    }

    pub fn derivative(&self, theta: f64) -> [f64; 2] {
        let (c, s) = (theta.cos(), theta.sin());
        let (c3, s3) = ((3.0 * theta).cos(), (3.0 * theta).sin());
        match self {
            Self::Identity => [-s, c],
            Self::Jk1 => [-s + s3, -c - c3],
            Self::Jk2 => [c - c3, -s - s3],
            Self::Jk1Literal => [-s - s3, -c + c3],
            Self::Jk2Literal => [c + c3, -s + s3],
        }
    }

    /// Polynomial extension to ℝ², agreeing with [`Self::value`] on the circle.
    pub fn extended(&self, m: [f64; 2]) -> [f64; 2] {
        let (a, b) = (m[0], m[1]);
        let k = 4.0 / 3.0;
        match self {
            Self::Identity => m,
            Self::Jk1 => [2.0 * a - k * a * a * a, -2.0 * b + k * b * b * b],
            Self::Jk2 => [k * b * b * b, k * a * a * a],
            Self::Jk1Literal => [k * a * a * a, -k * b * b * b],
            Self::Jk2Literal => [2.0 * b - k * b * b * b, 2.0 * a - k * a * a * a],
        }
    }
}

/// Tabulated `Φ^ψ(e^{iθ})` with exact θ-derivatives, cubic Hermite in between.
#[derive(Debug)]
struct PhiTable {
    values: Vec<[f64; 2]>,
    derivs: Vec<[f64; 2]>,
}

impl PhiTable {
    const SIZE: usize = 4096;

    fn new(psi: &TorusFunction) -> Self {
        let n = Self::SIZE;
        let mut values = Vec::with_capacity(n);
        let mut derivs = Vec::with_capacity(n);
        for k in 0..n {
            let th = 2.0 * PI * k as f64 / n as f64;
            values.push(half_circle_integral(psi, th));
            let lam = psi.eval(th + FRAC_PI_2) + psi.eval(th - FRAC_PI_2);
            derivs.push([-lam * th.sin(), lam * th.cos()]);
        }
        Self { values, derivs }
    }

    fn eval(&self, theta: f64) -> [f64; 2] {
        let n = self.values.len();
        let step = 2.0 * PI / n as f64;
        let x = theta.rem_euclid(2.0 * PI) / step;
        let k = (x.floor() as usize).min(n - 1);
        let t = x - k as f64;
        let k1 = (k + 1) % n;
        let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
        let h10 = t * (1.0 - t) * (1.0 - t);
        let h01 = t * t * (3.0 - 2.0 * t);
        let h11 = t * t * (t - 1.0);
        let mut out = [0.0; 2];
        for c in 0..2 {
            out[c] = h00 * self.values[k][c]
                + h10 * step * self.derivs[k][c]
                + h01 * self.values[k1][c]
                + h11 * step * self.derivs[k1][c];
        }
        out
    }
}

/// `∫_{θ-π/2}^{θ+π/2} ψ(s) e^{is} ds`: composite Gauss-Legendre for closed
/// forms, mode by mode for sampled generators.
fn half_circle_integral(psi: &TorusFunction, theta: f64) -> [f64; 2] {
    if !psi.has_closed_form() {
        return psi.half_circle_moment(theta);
    }
    let rule = GaussLegendre::g20();
    let a = theta - FRAC_PI_2;
    let b = theta + FRAC_PI_2;
    let c = rule.integrate(a, b, 8, |s| psi.eval(s) * s.cos());
    let s = rule.integrate(a, b, 8, |s| psi.eval(s) * s.sin());
    [c, s]
}

/// Checks `∫ψ e^{is} ds = 0`; returns the measured moment magnitude.
pub fn check_moment(psi: &TorusFunction) -> Result<f64> {
    let m = psi.first_moment();
    let mag = m[0].hypot(m[1]);
    if mag > MOMENT_TOL * psi.sup().max(1.0) {
        return Err(Error::MomentCondition(mag));
    }
    Ok(mag)
}

/// `κ Φ^ψ(w)` for a unit vector `w`.
pub fn phi_from_psi(psi: &TorusFunction, kappa: f64, w: [f64; 2]) -> Result<[f64; 2]> {
    check_moment(psi)?;
    let v = half_circle_integral(psi, w[1].atan2(w[0]));
    Ok([kappa * v[0], kappa * v[1]])
}

/// A member (or, for the literal rows, a candidate member) of the entropy class.
#[derive(Debug, Clone)]
pub struct Entropy {
    pub name: String,
    pub kappa: f64,
    pub generator: Option<TorusFunction>,
    pub closed: Option<ClosedForm>,
    table: Option<Arc<PhiTable>>,
}

/// Which sign convention to use for the Jin-Kohn pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JinKohnConvention {
    /// Generators `cos 2s`, `sin 2s`; satisfies the tangency condition.
    EntFixed,
    /// Matrix rows as printed; fails the tangency condition.
    Literal,
}

impl Entropy {
    pub fn identity() -> Self {
        let psi =
            TorusFunction::from_closed(|_| 0.5, 256, false, true).expect("constant generator");
        Self {
            name: "id".into(),
            kappa: 1.0,
            generator: Some(psi),
            closed: Some(ClosedForm::Identity),
            table: None,
        }
    }

    pub fn closed(
        name: &str,
        form: ClosedForm,
        kappa: f64,
        generator: Option<TorusFunction>,
    ) -> Self {
        Self {
            name: name.into(),
            kappa,
            generator,
            closed: Some(form),
            table: None,
        }
    }

    /// Entropy generated by `ψ`; the moment condition is enforced.
    pub fn from_generator(name: &str, psi: TorusFunction, kappa: f64) -> Result<Self> {
        check_moment(&psi)?;
        let table = Arc::new(PhiTable::new(&psi));
        Ok(Self {
            name: name.into(),
            kappa,
            generator: Some(psi),
            closed: None,
            table: Some(table),
        })
    }

    /// Parses `id`, `jk1`, `jk2`, `jk1-literal`, `jk2-literal`, `psi:<table-file>`.
    pub fn from_name(name: &str, kappa: f64) -> Result<Self> {
        let (jk1, jk2) = jin_kohn_pair(kappa, JinKohnConvention::EntFixed);
        let (l1, l2) = jin_kohn_pair(kappa, JinKohnConvention::Literal);
        match name {
            "id" => {
                let mut e = Self::identity();
                e.kappa = kappa;
                Ok(e)
            }
            "jk1" => Ok(jk1),
            "jk2" => Ok(jk2),
            "jk1-literal" => Ok(l1),
            "jk2-literal" => Ok(l2),
            _ => match name.strip_prefix("psi:") {
                Some(path) => {
                    Self::from_generator(name, TorusFunction::from_table_file(path)?, kappa)
                }
                None => Err(Error::Config(format!("unknown entropy `{name}`"))),
            },
        }
    }

    /// `Φ(e^{iθ})`.
    pub fn value_at(&self, theta: f64) -> [f64; 2] {
        let v = if let Some(c) = self.closed {
            c.value(theta)
        } else if let Some(t) = &self.table {
            t.eval(theta)
        } else {
            unreachable!("entropy without closed form or table")
        };
        [self.kappa * v[0], self.kappa * v[1]]
    }

    pub fn value(&self, w: [f64; 2]) -> [f64; 2] {
        self.value_at(w[1].atan2(w[0]))
    }

    pub fn has_extension(&self) -> bool {
        self.closed.is_some()
    }

    /// Polynomial extension off the circle, when available.
    pub fn extended(&self, m: [f64; 2]) -> Option<[f64; 2]> {
        self.closed.map(|c| {
            let v = c.extended(m);
            [self.kappa * v[0], self.kappa * v[1]]
        })
    }

    /// Derivative along the circle by a five-point stencil of step `h`.
    pub fn stencil_derivative(&self, theta: f64, h: f64) -> [f64; 2] {
        let f = |t: f64| self.value_at(t);
        let (a, b, c, d) = (
            f(theta + 2.0 * h),
            f(theta + h),
            f(theta - h),
            f(theta - 2.0 * h),
        );
        [
            (-a[0] + 8.0 * b[0] - 8.0 * c[0] + d[0]) / (12.0 * h),
            (-a[1] + 8.0 * b[1] - 8.0 * c[1] + d[1]) / (12.0 * h),
        ]
    }
}

/// Jin-Kohn pair `(Σ₁, Σ₂)` with normalization `κ`.
pub fn jin_kohn_pair(kappa: f64, convention: JinKohnConvention) -> (Entropy, Entropy) {
    match convention {
        JinKohnConvention::EntFixed => {
            let g1 =
                TorusFunction::from_closed(|s| (2.0 * s).cos(), 256, false, true).expect("cos 2s");
            let g2 =
                TorusFunction::from_closed(|s| (2.0 * s).sin(), 256, true, true).expect("sin 2s");
            (
                Entropy::closed("jk1", ClosedForm::Jk1, kappa, Some(g1)),
                Entropy::closed("jk2", ClosedForm::Jk2, kappa, Some(g2)),
            )
        }
        JinKohnConvention::Literal => (
            Entropy::closed("jk1-literal", ClosedForm::Jk1Literal, kappa, None),
            Entropy::closed("jk2-literal", ClosedForm::Jk2Literal, kappa, None),
        ),
    }
}

/// `ψ(s) = -½ e^{is}·(d/ds)Φ(ie^{is})`, derivative by a five-point stencil of step `π/n`.
pub fn psi_from_phi(phi: &Entropy, s: f64, n: usize) -> f64 {
    let d = phi.stencil_derivative(s + FRAC_PI_2, PI / n as f64);
    -0.5 * (s.cos() * d[0] + s.sin() * d[1])
}

/// Samples [`psi_from_phi`] on `n` nodes; rejects non-odd entropies (whose
/// generator fails to be π-periodic).
pub fn psi_table_from_phi(phi: &Entropy, n: usize) -> Result<TorusFunction> {
    let samples: Vec<f64> = (0..n)
        .map(|k| psi_from_phi(phi, 2.0 * PI * k as f64 / n as f64, n))
        .collect();
    let mut defect: f64 = 0.0;
    for k in 0..n {
        defect = defect.max((samples[k] - samples[(k + n / 2) % n]).abs());
    }
    if defect > 1e-8 {
        return Err(Error::NotOdd(defect));
    }
    let mut t = TorusFunction::from_samples(samples, false, false)?;
    t.pi_periodic = true;
    Ok(t)
}

/// Normal-component defect of `dΦ/dθ` and the tangential factor `λ_Φ`.
#[derive(Debug, Clone)]
pub struct TangencyReport {
    pub defect: f64,
    pub argmax: f64,
    pub lambda: TorusFunction,
}

pub fn ent_tangency_defect(phi: &Entropy, n: usize) -> Result<TangencyReport> {
    let h = 2.0 * PI / n as f64;
    let mut defect: f64 = 0.0;
    let mut argmax = 0.0;
    let mut lambda = Vec::with_capacity(n);
    for k in 0..n {
        let th = k as f64 * h;
        let d = phi.stencil_derivative(th, h);
        let (c, s) = (th.cos(), th.sin());
        let normal = c * d[0] + s * d[1];
        lambda.push(-s * d[0] + c * d[1]);
        if normal.abs() > defect {
            defect = normal.abs();
            argmax = th;
        }
    }
    Ok(TangencyReport {
        defect,
        argmax,
        lambda: TorusFunction::from_samples(lambda, false, false)?,
    })
}

/// Pointwise flux `Φ(m)` of a unit field.
pub fn flux_field(m: &AngleField, phi: &Entropy) -> VectorField2 {
    let g = m.grid;
    let mut u = vec![f64::NAN; g.len()];
    let mut v = vec![f64::NAN; g.len()];
    for k in 0..g.len() {
        if m.mask.get(k) {
            let f = phi.value_at(m.theta[k]);
            u[k] = f[0];
            v[k] = f[1];
        }
    }
    VectorField2 {
        grid: g,
        mask: m.mask.clone(),
        u,
        v,
    }
}

/// `div Φ(m)` by central differences on `region` eroded by one cell; disks of
/// `DEFAULT_CORE_CELLS` cells around singular points are excised.
pub fn entropy_production(m: &AngleField, phi: &Entropy, region: &Mask) -> Result<ScalarField> {
    let core = DEFAULT_CORE_CELLS * m.grid.hx.max(m.grid.hy);
    let region = region.and(&m.regular_mask(core));
    divergence(&flux_field(m, phi), &region)
}

/// `div Φ(m)` for a non-unit field through the polynomial extension.
pub fn entropy_production_vector(
    m: &VectorField2,
    phi: &Entropy,
    region: &Mask,
) -> Result<ScalarField> {
    if !phi.has_extension() {
        return Err(Error::InvalidArgument(format!(
            "entropy `{}` has no polynomial extension",
            phi.name
        )));
    }
    let g = m.grid;
    let mut u = vec![f64::NAN; g.len()];
    let mut v = vec![f64::NAN; g.len()];
    for k in 0..g.len() {
        if m.mask.get(k) {
            let f = phi.extended(m.at(k)).expect("checked above");
            u[k] = f[0];
            v[k] = f[1];
        }
    }
    divergence(
        &VectorField2 {
            grid: g,
            mask: m.mask.clone(),
            u,
            v,
        },
        region,
    )
}

/// `(Φ(m₊) - Φ(m₋))·ν` for an admissible jump `(m₊ - m₋)·ν = 0`.
pub fn jump_flux(m_minus: [f64; 2], m_plus: [f64; 2], nu: [f64; 2], phi: &Entropy) -> Result<f64> {
    let jump = (m_plus[0] - m_minus[0]) * nu[0] + (m_plus[1] - m_minus[1]) * nu[1];
    if jump.abs() > 1e-12 {
        return Err(Error::InadmissibleJump(jump));
    }
    let eval = |w: [f64; 2]| phi.extended(w).unwrap_or_else(|| phi.value(w));
    let a = eval(m_plus);
    let b = eval(m_minus);
    Ok((a[0] - b[0]) * nu[0] + (a[1] - b[1]) * nu[1])
}

/// Both sides of `‖div Φ(m_r)‖_{L^p(B₁)} = r^{1-2/p} ‖div Φ(m)‖_{L^p(B_r)}`.
#[derive(Debug, Clone, Copy)]
pub struct ScalingReport {
    pub lhs: f64,
    pub rhs: f64,
    pub prefactor: f64,
}

pub fn scaling_prefactor(r: f64, p: f64) -> f64 {
    r.powf(1.0 - 2.0 / p)
}

/// Rescales `m` onto `target` (centered at the origin) and compares both sides.
pub fn scaling_check(
    m: &AngleField,
    phi: &Entropy,
    r: f64,
    p: f64,
    target: &Grid2,
) -> Result<ScalingReport> {
    let margin = 3.0 * target.hx.max(target.hy);
    let sample_mask = Mask::disk(target, [0.0, 0.0], 1.0 + margin);
    let mr = rescale_field(m, r, target, &sample_mask)?;
    let ball1 = Mask::disk(target, [0.0, 0.0], 1.0);
    let prod_r = entropy_production(&mr, phi, &Mask::full(target))?;
    let lhs = lp_norm(&prod_r, p, &ball1)?;
    let ball_r = Mask::disk(&m.grid, [0.0, 0.0], r);
    if ball_r.count() == 0 {
        return Err(Error::EmptyRegion("B_r".into()));
    }
    // every cell of B_r needs a full stencil
    if !ball_r.is_subset_of(&m.mask.erode(1)) {
        return Err(Error::OutOfDomain { x: r, y: 0.0 });
    }
    let prod = entropy_production(m, phi, &Mask::full(&m.grid))?;
    let prefactor = scaling_prefactor(r, p);
    let rhs = prefactor * lp_norm(&prod, p, &ball_r)?;
    Ok(ScalingReport {
        lhs,
        rhs,
        prefactor,
    })
}
