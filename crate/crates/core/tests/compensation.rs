use eklab_core::compensation::*;
use eklab_core::kinetic::*;
use eklab_core::quad::adaptive_split;
use eklab_core::*;
use proptest::prelude::*;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

const TWO_PI: f64 = 2.0 * PI;

fn unit(a: f64) -> [f64; 2] {
    [a.cos(), a.sin()]
}

fn kernels() -> Vec<TestKernel> {
    vec![
        TestKernel::power(0.6).unwrap(),
        TestKernel::power(1.0).unwrap(),
        TestKernel::power(3.0).unwrap(),
        TestKernel::sin2(),
    ]
}

fn ind(t: f64, th: f64) -> f64 {
    if (t - th).cos() > 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Breakpoints in `[0, 2π]` of the arcs of the given angles.
fn arc_breaks(angles: &[f64]) -> Vec<f64> {
    let mut b = Vec::new();
    for &th in angles {
        for d in [-FRAC_PI_2, FRAC_PI_2] {
            b.push((th + d).rem_euclid(TWO_PI));
        }
    }
    b
}

/// `∫_𝕋 φ′(t - α) sin t · w(t) dt` with `w` piecewise constant between the breaks.
fn dphi_sin_integral(phi: &TestKernel, alpha: f64, w: impl Fn(f64) -> f64, breaks: &[f64]) -> f64 {
    let mut br = breaks.to_vec();
    br.extend(phi.seams_in(0.0, TWO_PI, alpha));
    adaptive_split(|t| phi.dphi(t - alpha) * t.sin() * w(t), 0.0, TWO_PI, &br, 1e-13, 1e-12)
}

#[test]
fn xi_methods_agree_over_kernel_matrix() {
    for phi in kernels() {
        for beta in [0.05, 0.3, FRAC_PI_4, 1.0, 1.4, FRAC_PI_2] {
            let th = 0.37;
            let (z1, z2) = (unit(th - beta), unit(th + beta));
            let a = xi_phi(&phi, z1, z2, XiMethod::ClosedForm);
            let b = xi_phi(&phi, z1, z2, XiMethod::DoubleQuadrature);
            assert!((a - b).abs() < 1e-6, "{} β={beta}: {a} vs {b}", phi.name());
        }
    }
}

#[test]
fn xi_sin2_quarter_pi_is_32_over_9() {
    // 8 ∫₀^{π/2} sin 2t (π/2 - t) sin t dt = 8 · 4/9
    let phi = TestKernel::sin2();
    let z1 = unit(-FRAC_PI_4);
    let z2 = unit(FRAC_PI_4);
    for m in [XiMethod::ClosedForm, XiMethod::DoubleQuadrature] {
        assert!((xi_phi(&phi, z1, z2, m) - 32.0 / 9.0).abs() < 1e-6);
    }
}

#[test]
fn coercivity_ratio_is_positive_for_cubic_kernel() {
    let phi = TestKernel::power(3.0).unwrap();
    let r = coercivity_report(&phi, &beta_grid(512)).unwrap();
    assert!(r.min_ratio > 0.0 && r.min_ratio.is_finite());
    assert_eq!(r.samples.len(), 512);
    assert_eq!(omega(&phi, 0.0), 0.0);
    assert!((omega(&phi, 1.0) - 1.0 / 5120.0).abs() < 1e-15);
}

#[test]
fn delta_vanishes_for_constant_field() {
    let g = Grid2::square(0.0, 1.0, 16).unwrap();
    let m = make_canonical_field(CanonicalKind::Constant { theta0: 0.8 }, &g, &Mask::full(&g)).unwrap();
    let phi = TestKernel::power(3.0).unwrap();
    let d = delta_field(&m, &phi, Displacement::Cells(2, 1), XiMethod::ClosedForm).unwrap();
    assert!(d.values.iter().filter(|v| !v.is_nan()).all(|&v| v == 0.0));
    let a = a_field(&m, &phi, 3).unwrap();
    assert!(a.u.iter().chain(&a.v).filter(|v| !v.is_nan()).all(|&v| v == 0.0));
}

#[test]
fn delta_two_paths_agree_on_smooth_field() {
    let g = Grid2::square(-1.0, 1.0, 12).unwrap();
    let m = make_canonical_field(CanonicalKind::SyntheticSmooth, &g, &Mask::full(&g)).unwrap();
    for phi in [TestKernel::power(3.0).unwrap(), TestKernel::sin2()] {
        for h in [Displacement::Cells(3, -1), Displacement::Offset([0.17, 0.05])] {
            let a = delta_field(&m, &phi, h, XiMethod::ClosedForm).unwrap();
            let b = delta_field(&m, &phi, h, XiMethod::DoubleQuadrature).unwrap();
            assert_eq!(a.mask, b.mask);
            for k in 0..g.len() {
                if a.mask.get(k) {
                    assert!((a.values[k] - b.values[k]).abs() < 1e-6);
                }
            }
        }
    }
}

#[test]
fn wall_crossing_delta_is_coercive() {
    let g = Grid2::square(-1.0, 1.0, 32).unwrap();
    let alpha = 0.6;
    let kind = CanonicalKind::Wall { alpha, axis: Axis::Vertical, offset: 0.0 };
    let m = make_canonical_field(kind, &g, &Mask::full(&g)).unwrap();
    let phi = TestKernel::power(3.0).unwrap();
    let c = coercivity_report(&phi, &beta_grid(512)).unwrap().min_ratio;
    let d = delta_field(&m, &phi, Displacement::Cells(2, 0), XiMethod::ClosedForm).unwrap();
    let w = omega(&phi, 2.0 * alpha.sin());
    let mut crossing = 0;
    for k in 0..g.len() {
        let x = g.center_of(k);
        if d.mask.get(k) && x[0] < 0.0 && x[0] + 2.0 * g.hx > 0.0 {
            crossing += 1;
            // Δ = ½Ξ and Ξ ≥ c ω
            assert!(d.values[k] >= 0.5 * c * w * (1.0 - 1e-9));
        }
    }
    assert_eq!(crossing, 2 * 32);
}

#[test]
fn a_field_vanishes_on_one_side_of_the_wall() {
    let g = Grid2::square(-1.0, 1.0, 16).unwrap();
    let kind = CanonicalKind::Wall { alpha: 0.5, axis: Axis::Vertical, offset: 0.0 };
    let m = make_canonical_field(kind, &g, &Mask::full(&g)).unwrap();
    let phi = TestKernel::power(3.0).unwrap();
    let a = a_field(&m, &phi, 2).unwrap();
    for k in 0..g.len() {
        let x = g.center_of(k);
        if a.mask.get(k) {
            let same_side = (x[0] > 0.0) == (x[0] + 2.0 * g.hx > 0.0);
            if same_side {
                assert_eq!(a.at(k), [0.0, 0.0]);
            } else {
                assert!(a.u[k].hypot(a.v[k]) > 1e-3);
            }
        }
    }
}

#[test]
fn a_bound_ratio_is_stable_under_refinement() {
    let phi = TestKernel::power(3.0).unwrap();
    let mut ratios = Vec::new();
    for n in [32, 64] {
        let g = Grid2::square(-1.0, 1.0, n).unwrap();
        let mask = Mask::annulus(&g, [0.0, 0.0], 0.2, 0.95);
        let m = make_canonical_field(CanonicalKind::Vortex { center: [0.0, 0.0] }, &g, &mask).unwrap();
        let a = a_field(&m, &phi, n / 16).unwrap();
        ratios.push(a_bound_ratio(&m, &a, &phi, n / 16).unwrap());
    }
    assert!(ratios.iter().all(|r| r.is_finite() && *r > 0.0));
    assert!(ratios[1] / ratios[0] < 1.5 && ratios[0] / ratios[1] < 1.5, "{ratios:?}");
}

#[test]
fn continuum_a_matches_fine_s_grid() {
    let phi = TestKernel::power(3.0).unwrap();
    let g = Grid2::square(-1.0, 1.0, 8).unwrap();
    let mask = Mask::annulus(&g, [0.0, 0.0], 0.2, 0.99);
    let m = make_canonical_field(CanonicalKind::Vortex { center: [0.0, 0.0] }, &g, &mask).unwrap();
    let a = a_field(&m, &phi, 2).unwrap();
    let chi = chi_field(&m, 1 << 14).unwrap();
    let (_, ad, _) = discrete_fields(&chi, None, &phi, 2, EnginePath::Auto).unwrap();
    for k in 0..g.len() {
        if a.mask.get(k) {
            assert!((a.u[k] - ad.u[k]).abs() < 2e-3 && (a.v[k] - ad.v[k]).abs() < 2e-3);
        }
    }
}

#[test]
fn g_is_well_defined_and_identity_holds() {
    let phi = TestKernel::power(3.0).unwrap();
    for (a, th) in [(0.3, 1.1), (-2.0, 0.4), (2.8, -1.7)] {
        let g0 = g_func(&phi, a, th);
        assert!((g_func(&phi, a + TWO_PI, th) - g0).abs() < 1e-11);
        assert!((g_func(&phi, a, th + TWO_PI) - g0).abs() < 1e-11);
    }
    for th in [0.0, 0.7, 2.5, -1.2] {
        for beta in [-2.5, -0.4, 0.1, 1.3, 3.0] {
            assert!(gh_identity_check(&phi, th, beta) < 1e-10, "θ={th} β={beta}");
        }
    }
    let alphas: Vec<f64> = (1..=64).map(|k| k as f64 * PI / 64.0).collect();
    let r = h_bound_ratio(&phi, 3.0, &alphas, 32);
    assert!(r.is_finite() && r > 0.0);
}

/// Direct one-dimensional evaluation of `I^τ` for the parametric density.
fn i_parametric_oracle(phi: &TestKernel, th0: f64, th1: f64, f0: f64, f1: f64) -> f64 {
    let br = arc_breaks(&[th0, th1]);
    let d = |t: f64| ind(t, th1) - ind(t, th0);
    let i1 = 2.0 * f0 * dphi_sin_integral(phi, th0 + FRAC_PI_2, d, &br);
    let i2 = 2.0 * f1 * dphi_sin_integral(phi, th1 + FRAC_PI_2, d, &br);
    let i3 = |th: f64, f: f64| 2.0 * f * dphi_sin_integral(phi, th + FRAC_PI_2, |t| ind(t, th), &arc_breaks(&[th]));
    i1 + i2 - (i3(th1, f1) - i3(th0, f0))
}

#[test]
fn parametric_i_matches_direct_formula() {
    let g = Grid2::square(-1.0, 1.0, 10).unwrap();
    let full = Mask::full(&g);
    let m = AngleField::from_fn(&g, &full, |p| 2.2 * p[0] + 1.3 * (2.0 * p[1]).sin());
    let f = ScalarField::from_fn(&g, &full, |p| 0.5 + p[0] * p[1]);
    for phi in [TestKernel::power(3.0).unwrap(), TestKernel::sin2()] {
        let tc = 3;
        let i = i_field(IInput::Parametric { m: &m, f: &f }, &phi, tc).unwrap();
        for k in 0..g.len() {
            if !i.mask.get(k) {
                continue;
            }
            let (ci, cj) = g.ij(k);
            let t = g.idx(ci + tc, cj);
            let want = i_parametric_oracle(&phi, m.theta[k], m.theta[t], f.values[k], f.values[t]);
            assert!((i.values[k] - want).abs() < 1e-8, "cell {k}: {} vs {want}", i.values[k]);
        }
    }
}

#[test]
fn parametric_i_vanishes_without_f_and_obeys_bounds() {
    let g = Grid2::square(-1.0, 1.0, 16).unwrap();
    let full = Mask::full(&g);
    let m = make_canonical_field(CanonicalKind::SyntheticSmooth, &g, &full).unwrap();
    let phi = TestKernel::power(3.0).unwrap();
    let zero = ScalarField::constant(&g, &full, 0.0);
    let i = i_field(IInput::Parametric { m: &m, f: &zero }, &phi, 2).unwrap();
    assert!(i.values.iter().filter(|v| !v.is_nan()).all(|&v| v == 0.0));
    // |I₁| ≲ |F||D^τm|^γ and |I₃| ≲ ‖φ′‖₁|F|
    let mut r1: f64 = 0.0;
    for k in 0..g.len() {
        let (ci, cj) = g.ij(k);
        let Some(t) = g.offset(ci, cj, 2, 0) else { continue };
        let beta = wrap_angle(m.theta[t] - m.theta[k]);
        let dm = 2.0 * (0.5 * beta).sin().abs();
        if dm > 1e-6 {
            r1 = r1.max((4.0 * h_func(&phi, m.theta[k], beta)).abs() / dm.powi(3));
        }
        let r3 = i3_parametric(&phi, m.theta[k], 1.0).abs() / phi.dphi_l1_norm();
        assert!(r3 <= 2.0 + 1e-12);
    }
    assert!(r1.is_finite() && r1 > 0.0);
}

/// `∫φ′(t - s)σ(s) ds` for trigonometric σ, by adaptive quadrature.
fn j_oracle(phi: &TestKernel, c: &[f64; 5], t: f64) -> f64 {
    let sig = |s: f64| c[0] + c[1] * s.cos() + c[2] * s.sin() + c[3] * (2.0 * s).cos() + c[4] * (2.0 * s).sin();
    let br = phi.seams_in(0.0, TWO_PI, t);
    adaptive_split(|s| phi.dphi(t - s) * sig(s), 0.0, TWO_PI, &br, 1e-12, 1e-11)
}

#[test]
fn general_i_matches_direct_quadrature_on_synthetic_pair() {
    let n = 256;
    let g = Grid2::square(0.0, TWO_PI, n).unwrap();
    let full = Mask::full(&g);
    let (a, b, c) = builtin_abc();
    let (chi, sigma) = synthetic_kinetic_pair(&g, &full, 512, &a, &b, &c).unwrap();
    let phi = TestKernel::power(3.0).unwrap();
    let tc = 5;
    let i = i_field(IInput::General { chi: &chi, sigma: &sigma }, &phi, tc).unwrap();
    let KineticData::Trig { a: av, b: bv, c: cv } = &chi.data else { unreachable!() };
    let KineticDensity::Trig { coeffs, .. } = &sigma else { unreachable!() };
    for &(ci, cj) in &[(10usize, 20usize), (100, 37), (200, 250), (57, 128)] {
        let (k0, k1) = (g.idx(ci, cj), g.idx(ci + tc, cj));
        let chi_at = |k: usize, t: f64| av[k] * t.cos() + bv[k] * t.sin() + cv[k];
        let gl = eklab_core::quad::GaussLegendre::new(20);
        let seams: Vec<f64> = (0..=64).map(|q| q as f64 * TWO_PI / 64.0).collect();
        let integrate = |f: &dyn Fn(f64) -> f64| {
            seams.windows(2).map(|w| gl.integrate(w[0], w[1], 1, f)).sum::<f64>()
        };
        let (c0, c1) = (coeffs[k0], coeffs[k1]);
        let first = integrate(&|t| {
            (j_oracle(&phi, &c0, t) + j_oracle(&phi, &c1, t)) * (chi_at(k1, t) - chi_at(k0, t)) * t.sin()
        });
        let i3 = |k: usize, c: &[f64; 5]| integrate(&|t| j_oracle(&phi, c, t) * chi_at(k, t) * t.sin());
        let want = first - (i3(k1, &c1) - i3(k0, &c0));
        assert!((i.values[k0] - want).abs() < 1e-4, "{} vs {want}", i.values[k0]);
    }
}

#[test]
fn engine_paths_agree() {
    let phi = TestKernel::power(3.0).unwrap();
    // trigonometric data: sparse modes vs FFT of the sections
    let g = Grid2::square(0.0, TWO_PI, 16).unwrap();
    let full = Mask::full(&g);
    let (a, b, c) = builtin_abc();
    let (chi, sigma) = synthetic_kinetic_pair(&g, &full, 128, &a, &b, &c).unwrap();
    let (d1, a1, i1) = discrete_fields(&chi, Some(&sigma), &phi, 3, EnginePath::Auto).unwrap();
    let (d2, a2, i2) = discrete_fields(&chi, Some(&sigma), &phi, 3, EnginePath::Dense).unwrap();
    for k in 0..g.len() {
        if d1.mask.get(k) {
            assert!((d1.values[k] - d2.values[k]).abs() < 1e-12);
            assert!((a1.u[k] - a2.u[k]).abs() < 1e-12 && (a1.v[k] - a2.v[k]).abs() < 1e-12);
            assert!((i1.values[k] - i2.values[k]).abs() < 1e-12);
        }
    }
    // indicator data with a parametric density: node ranges vs FFT
    let g = Grid2::square(-1.0, 1.0, 12).unwrap();
    let mask = Mask::annulus(&g, [0.0, 0.0], 0.2, 0.99);
    let m = make_canonical_field(CanonicalKind::Vortex { center: [0.0, 0.0] }, &g, &mask).unwrap();
    let f = ScalarField::from_fn(&g, &mask, |p| 1.0 + p[0]);
    let sigma = KineticDensity::parametric(m.clone(), f).unwrap();
    let chi = chi_field(&m, 256).unwrap();
    let (d1, a1, i1) = discrete_fields(&chi, Some(&sigma), &phi, 2, EnginePath::Auto).unwrap();
    let (d2, a2, i2) = discrete_fields(&chi, Some(&sigma), &phi, 2, EnginePath::Dense).unwrap();
    for k in 0..g.len() {
        if d1.mask.get(k) {
            assert!((d1.values[k] - d2.values[k]).abs() < 1e-12);
            assert!((a1.u[k] - a2.u[k]).abs() < 1e-12 && (a1.v[k] - a2.v[k]).abs() < 1e-12);
            assert!((i1.values[k] - i2.values[k]).abs() < 1e-11);
        }
    }
}

#[test]
fn residual_vanishes_for_constant_field() {
    let g = Grid2::square(-1.0, 1.0, 32).unwrap();
    let full = Mask::full(&g);
    let m = make_canonical_field(CanonicalKind::Constant { theta0: 0.3 }, &g, &full).unwrap();
    let chi = chi_field(&m, 128).unwrap();
    let phi = TestKernel::power(3.0).unwrap();
    let eta = TestFunction::radial([-0.2, 0.0], 0.2, 0.5).unwrap();
    let rho = TestFunction::SinePower1D { a: 0.0, b: 0.4, k: 4 };
    let r = comp_identity_residual(&chi, None, &phi, &eta, &rho, 0.4).unwrap();
    assert!(r.residual < 1e-14, "{r:?}");
}

#[test]
fn residual_rejects_support_violations() {
    let g = Grid2::square(-1.0, 1.0, 32).unwrap();
    let full = Mask::full(&g);
    let m = make_canonical_field(CanonicalKind::Constant { theta0: 0.3 }, &g, &full).unwrap();
    let chi = chi_field(&m, 128).unwrap();
    let phi = TestKernel::power(3.0).unwrap();
    let eta = TestFunction::radial([0.5, 0.0], 0.2, 0.4).unwrap();
    let rho = TestFunction::SinePower1D { a: 0.0, b: 0.4, k: 4 };
    assert!(matches!(
        comp_identity_residual(&chi, None, &phi, &eta, &rho, 0.4),
        Err(Error::Support(_))
    ));
    let wide = TestFunction::SinePower1D { a: 0.0, b: 0.6, k: 4 };
    let eta = TestFunction::radial([-0.3, 0.0], 0.1, 0.2).unwrap();
    assert!(comp_identity_residual(&chi, None, &phi, &eta, &wide, 0.4).is_err());
}

#[test]
fn residual_decreases_on_synthetic_pair() {
    let phi = TestKernel::power(3.0).unwrap();
    let tau_max = 16.0 * TWO_PI / 64.0;
    let mut res = Vec::new();
    for (n, ns) in [(64, 128), (128, 256), (256, 512)] {
        let g = Grid2::square(0.0, TWO_PI, n).unwrap();
        let full = Mask::full(&g);
        let (a, b, c) = builtin_abc();
        let (chi, sigma) = synthetic_kinetic_pair(&g, &full, ns, &a, &b, &c).unwrap();
        let eta = TestFunction::radial([2.5, 3.0], 0.4, 1.6).unwrap();
        let rho = TestFunction::SinePower1D { a: 0.0, b: tau_max, k: 4 };
        res.push(comp_identity_residual(&chi, Some(&sigma), &phi, &eta, &rho, tau_max).unwrap().residual);
    }
    for w in res.windows(2) {
        assert!(w[0] / w[1] > 1.7, "{res:?}");
    }
}

#[test]
fn residual_decreases_on_annulus_vortex() {
    let phi = TestKernel::power(3.0).unwrap();
    let mut res = Vec::new();
    for (n, ns) in [(64, 128), (128, 256), (256, 512)] {
        let g = Grid2::square(-1.0, 1.0, n).unwrap();
        let mask = Mask::annulus(&g, [0.0, 0.0], 0.1, 0.98);
        let m = make_canonical_field(CanonicalKind::Vortex { center: [0.0, 0.0] }, &g, &mask).unwrap();
        let chi = chi_field(&m, ns).unwrap();
        let eta = TestFunction::RingBump { center: [0.0, 0.0], r1: 0.55, r2: 0.6, ramp: 0.1 };
        let rho = TestFunction::SinePower1D { a: 0.0, b: 0.25, k: 4 };
        res.push(comp_identity_residual(&chi, None, &phi, &eta, &rho, 0.25).unwrap().residual);
    }
    for w in res.windows(2) {
        assert!(w[0] / w[1] > 1.5, "{res:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn xi_is_symmetric_rotation_invariant_and_nonnegative(
        a in -PI..PI, b in -PI..PI, rot in -PI..PI, g in 0.6f64..4.0,
    ) {
        let phi = TestKernel::power(g).unwrap();
        let x = xi_phi(&phi, unit(a), unit(b), XiMethod::DoubleQuadrature);
        let y = xi_phi(&phi, unit(b), unit(a), XiMethod::DoubleQuadrature);
        let z = xi_phi(&phi, unit(a + rot), unit(b + rot), XiMethod::DoubleQuadrature);
        prop_assert!((x - y).abs() < 1e-8);
        prop_assert!((x - z).abs() < 1e-8);
        prop_assert!(x >= -1e-12);
    }

    #[test]
    fn gh_identity_on_random_angles(th in -PI..PI, beta in -3.0f64..3.0) {
        let phi = TestKernel::sin2();
        prop_assert!(gh_identity_check(&phi, th, beta) < 1e-10);
    }
}

fn bootstrap_setup(n: usize) -> (Grid2, RegionSpec, TestFunction) {
    let g = Grid2::square(-1.0, 1.0, n).unwrap();
    let omega = Mask::full(&g);
    let u = Mask::disk(&g, [0.0, 0.0], 0.6);
    let inner = Mask::disk(&g, [0.0, 0.0], 0.3);
    let regions = RegionSpec::new(g, omega, u, inner).unwrap();
    let eta = TestFunction::radial([0.0, 0.0], 0.6, 0.65).unwrap();
    (g, regions, eta)
}

fn dyadic(r0: f64) -> Vec<f64> {
    (2..=6).map(|k| r0 / f64::from(1 << k)).collect()
}

#[test]
fn bootstrap_vanishes_for_constant_field() {
    let (g, regions, eta) = bootstrap_setup(64);
    let m = make_canonical_field(CanonicalKind::Constant { theta0: 1.0 }, &g, &Mask::full(&g)).unwrap();
    let t = besov_bootstrap(&m, None, 2.0, &regions, &eta, &[0.05, 0.1]).unwrap();
    for r in &t.rows {
        assert_eq!((r.lhs, r.holder_term, r.phi1_term, r.layer_term, r.c_tau), (0.0, 0.0, 0.0, 0.0, 0.0));
    }
    assert!(t.to_csv().starts_with("tau,lhs,holder_term,phi1_term,layer_term,C_tau,coercivity_c\n"));
}

#[test]
fn bootstrap_rejects_large_shift_and_bad_exponent() {
    let (g, regions, eta) = bootstrap_setup(64);
    let m = make_canonical_field(CanonicalKind::Constant { theta0: 1.0 }, &g, &Mask::full(&g)).unwrap();
    assert!(besov_bootstrap(&m, None, 2.0, &regions, &eta, &[0.9]).is_err());
    assert!(besov_bootstrap(&m, None, 2.5, &regions, &eta, &[0.1]).is_err());
}

/// `∫_{ℝ²} |m(y + e₁) - m(y)|⁶ dy` for the unit vortex, in polar coordinates.
fn vortex_structure_constant() -> f64 {
    let integrand = |r: f64, t: f64| {
        let (x, y) = (r * t.cos() + 1.0, r * t.sin());
        let a = y.atan2(x);
        r * ((a.cos() - t.cos()).powi(2) + (a.sin() - t.sin()).powi(2)).powi(3)
    };
    let outer = |t: f64| adaptive_split(|r| integrand(r, t), 0.0, 400.0, &[0.5, 1.0, 2.0, 10.0], 1e-9, 1e-9);
    adaptive_split(outer, 0.0, TWO_PI, &[PI], 1e-7, 1e-8)
}

#[test]
fn bootstrap_vortex_constant_is_bounded() {
    let (g, regions, eta) = bootstrap_setup(512);
    let kind = CanonicalKind::Vortex { center: [1e-3, 2e-3] };
    let m = make_canonical_field(kind, &g, &Mask::full(&g)).unwrap();
    let r0 = besov_bootstrap(&m, None, 2.0, &regions, &eta, &[]).unwrap().r0;
    let t = besov_bootstrap(&m, None, 2.0, &regions, &eta, &dyadic(r0)).unwrap();
    // ‖D^h m‖₆⁶ = K|h|² away from the boundary
    let k = vortex_structure_constant();
    assert!((k - 29.1259).abs() < 1e-2, "{k}");
    for r in &t.rows {
        assert!(r.c_tau < 3.0 * k);
        if r.tau >= 8.0 * g.hx {
            assert!((r.c_tau / k - 1.0).abs() < 0.03, "τ={} C={}", r.tau, r.c_tau);
        }
    }
}

#[test]
fn bootstrap_wall_constant_grows_like_tau_power() {
    let (g, regions, eta) = bootstrap_setup(512);
    let kind = CanonicalKind::Wall { alpha: 0.6, axis: Axis::Vertical, offset: 0.0 };
    let m = make_canonical_field(kind, &g, &Mask::full(&g)).unwrap();
    let p = 1.2;
    let r0 = besov_bootstrap(&m, None, p, &regions, &eta, &[]).unwrap().r0;
    let t = besov_bootstrap(&m, None, p, &regions, &eta, &dyadic(r0)).unwrap();
    let xs: Vec<f64> = t.rows.iter().map(|r| r.tau.ln()).collect();
    let ys: Vec<f64> = t.rows.iter().map(|r| r.c_tau.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    assert!((slope - (1.0 - p)).abs() < 0.1, "slope {slope}");
}
