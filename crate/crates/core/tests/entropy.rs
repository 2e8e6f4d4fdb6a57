use eklab_core::entropy::*;
use eklab_core::*;
use proptest::prelude::*;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_6, PI};

/// Midpoint rule over the half circle centred at θ.
fn oracle_phi(psi: impl Fn(f64) -> f64, theta: f64, n: usize) -> [f64; 2] {
    let h = PI / n as f64;
    let mut acc = [0.0; 2];
    for k in 0..n {
        let s = theta - FRAC_PI_2 + (k as f64 + 0.5) * h;
        acc[0] += psi(s) * s.cos() * h;
        acc[1] += psi(s) * s.sin() * h;
    }
    acc
}

fn close(a: [f64; 2], b: [f64; 2], tol: f64) -> bool {
    (a[0] - b[0]).abs() <= tol && (a[1] - b[1]).abs() <= tol
}

#[test]
fn jin_kohn_values_at_e1() {
    let (s1, s2) = jin_kohn_pair(1.0, JinKohnConvention::EntFixed);
    assert!(close(s1.value([1.0, 0.0]), [2.0 / 3.0, 0.0], 1e-14));
    assert!(close(s2.value([1.0, 0.0]), [0.0, 4.0 / 3.0], 1e-14));
    let r = 2f64.sqrt();
    assert!(close(
        s1.value_at(FRAC_PI_4),
        [2.0 * r / 3.0, -2.0 * r / 3.0],
        1e-14
    ));
}

#[test]
fn sin2s_generator_at_i() {
    let psi = TorusFunction::from_closed(|s| (2.0 * s).sin(), 128, true, true).unwrap();
    let v = phi_from_psi(&psi, 1.0, [0.0, 1.0]).unwrap();
    assert!(close(v, [4.0 / 3.0, 0.0], 1e-12));
}

#[test]
fn closed_forms_agree_with_generators() {
    let (s1, s2) = jin_kohn_pair(0.5, JinKohnConvention::EntFixed);
    for th in (0..37).map(|k| k as f64 * 0.17) {
        let o1 = oracle_phi(|s| (2.0 * s).cos(), th, 20000);
        let o2 = oracle_phi(|s| (2.0 * s).sin(), th, 20000);
        assert!(
            close(s1.value_at(th), [0.5 * o1[0], 0.5 * o1[1]], 1e-8),
            "jk1 at {th}"
        );
        assert!(
            close(s2.value_at(th), [0.5 * o2[0], 0.5 * o2[1]], 1e-8),
            "jk2 at {th}"
        );
    }
}

#[test]
fn tabulated_generator_matches_oracle() {
    let f = |s: f64| (2.0 * s).cos() + 0.3 * (6.0 * s).sin() + 0.1;
    let psi = TorusFunction::from_closed(f, 256, false, true).unwrap();
    let ent = Entropy::from_generator("mix", psi, 1.0).unwrap();
    for th in (0..50).map(|k| -3.0 + k as f64 * 0.121) {
        assert!(close(ent.value_at(th), oracle_phi(f, th, 20000), 1e-8));
    }
}

#[test]
fn round_trip_through_generator() {
    let (s1, s2) = jin_kohn_pair(1.0, JinKohnConvention::EntFixed);
    for phi in [Entropy::identity(), s1, s2] {
        let psi = psi_table_from_phi(&phi, 4096).unwrap();
        let back = Entropy::from_generator("back", psi, 1.0).unwrap();
        let mut err: f64 = 0.0;
        for k in 0..500 {
            let th = 2.0 * PI * k as f64 / 500.0 + 0.003;
            let (a, b) = (phi.value_at(th), back.value_at(th));
            err = err.max((a[0] - b[0]).abs()).max((a[1] - b[1]).abs());
        }
        assert!(err < 1e-8, "{}: {err:e}", phi.name);
    }
}

#[test]
fn tangency_defects() {
    let (s1, s2) = jin_kohn_pair(1.0, JinKohnConvention::EntFixed);
    for phi in [&s1, &s2] {
        assert!(ent_tangency_defect(phi, 2048).unwrap().defect < 1e-8);
    }
    // λ for Σ₁ is -2cos 2θ
    let rep = ent_tangency_defect(&s1, 2048).unwrap();
    for th in [0.0, 0.7, 2.2] {
        assert!((rep.lambda.eval(th) + 2.0 * (2.0 * th).cos()).abs() < 1e-8);
    }
    let (l1, _) = jin_kohn_pair(1.0, JinKohnConvention::Literal);
    let d = ent_tangency_defect(&l1, 2048).unwrap().defect;
    assert!((d - 2.0).abs() < 0.01, "{d}");
}

#[test]
fn wall_jump_flux() {
    let kappa = DEFAULT_KAPPA;
    let (s1, s2) = jin_kohn_pair(kappa, JinKohnConvention::EntFixed);
    let a = FRAC_PI_6;
    let (mm, mp) = ([a.cos(), -a.sin()], [a.cos(), a.sin()]);
    let j2 = jump_flux(mm, mp, [1.0, 0.0], &s2).unwrap();
    assert!((j2 - 8.0 / 3.0 * kappa * a.sin().powi(3)).abs() < 1e-14);
    assert!((j2 - 1.0 / 6.0).abs() < 1e-14);
    assert!(jump_flux(mm, mp, [1.0, 0.0], &s1).unwrap().abs() < 1e-14);
}

#[test]
fn vortex_production_vanishes_with_refinement() {
    let (_, s2) = jin_kohn_pair(1.0, JinKohnConvention::EntFixed);
    let mut prev = f64::INFINITY;
    for n in [64usize, 128, 256] {
        let g = Grid2::square(-1.0, 1.0, n).unwrap();
        let m = make_canonical_field(
            CanonicalKind::Vortex { center: [0.0, 0.0] },
            &g,
            &Mask::full(&g),
        )
        .unwrap();
        let region = Mask::annulus(&g, [0.0, 0.0], 0.25, 0.9);
        let d = entropy_production(&m, &s2, &region).unwrap();
        let err = lp_norm(&d, 2.0, &region.erode(1)).unwrap();
        assert!(err < prev / 3.0, "n={n}: {err:e}");
        prev = err;
    }
}

#[test]
fn scaling_identity_for_smooth_field() {
    let (s1, _) = jin_kohn_pair(1.0, JinKohnConvention::EntFixed);
    let src = Grid2::square(-2.2, 2.2, 352).unwrap();
    let m = make_canonical_field(CanonicalKind::SyntheticSmooth, &src, &Mask::full(&src)).unwrap();
    let target = Grid2::square(-1.1, 1.1, 176).unwrap();
    let rep = scaling_check(&m, &s1, 2.0, 2.0, &target).unwrap();
    assert!((rep.lhs / rep.rhs - 1.0).abs() < 0.02, "{rep:?}");
}

proptest! {
    #[test]
    fn entropies_are_odd(th in -10.0f64..10.0) {
        let (s1, s2) = jin_kohn_pair(0.7, JinKohnConvention::EntFixed);
        for phi in [s1, s2] {
            let (a, b) = (phi.value_at(th), phi.value_at(th + PI));
            prop_assert!(close(a, [-b[0], -b[1]], 1e-13));
        }
    }

    #[test]
    fn admissible_jumps_of_sigma1_vanish(alpha in 0.0f64..FRAC_PI_2) {
        let (s1, _) = jin_kohn_pair(1.0, JinKohnConvention::EntFixed);
        let j = jump_flux([alpha.cos(), -alpha.sin()], [alpha.cos(), alpha.sin()], [1.0, 0.0], &s1).unwrap();
        prop_assert!(j.abs() < 1e-13);
    }

    #[test]
    fn entropies_linear_in_kappa(k in 0.1f64..3.0, th in -4.0f64..4.0) {
        let (a, _) = jin_kohn_pair(k, JinKohnConvention::EntFixed);
        let (b, _) = jin_kohn_pair(1.0, JinKohnConvention::EntFixed);
        let (va, vb) = (a.value_at(th), b.value_at(th));
        prop_assert!(close(va, [k * vb[0], k * vb[1]], 1e-13));
    }
}
