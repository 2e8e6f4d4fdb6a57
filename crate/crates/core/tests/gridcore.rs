use eklab_core::*;
use proptest::prelude::*;
use std::f64::consts::{FRAC_PI_6, PI};

fn vortex_on(n: usize) -> (Grid2, VectorField2) {
    let g = Grid2::square(-1.1, 1.1, n).unwrap();
    let m = make_canonical_field(CanonicalKind::Vortex { center: [0.0, 0.0] }, &g, &Mask::full(&g)).unwrap();
    (g, m.to_vector())
}

fn sup_on(f: &ScalarField, region: &Mask) -> f64 {
    (0..f.grid.len()).filter(|&k| region.get(k)).map(|k| f.values[k].abs()).fold(0.0, f64::max)
}

#[test]
fn grid_invariants() {
    assert!(Grid2::new(3, 8, 0.0, 0.0, 0.1, 0.1).is_err());
    assert!(Grid2::new(8, 8, 0.0, 0.0, 0.0, 0.1).is_err());
    let g = Grid2::new(5, 7, -1.0, 2.0, 0.5, 0.25).unwrap();
    assert_eq!(g.center(2, 3), [-1.0 + 2.5 * 0.5, 2.0 + 3.5 * 0.25]);
}

#[test]
fn region_nesting_is_enforced() {
    let g = Grid2::square(-1.0, 1.0, 64).unwrap();
    let omega = Mask::disk(&g, [0.0, 0.0], 0.9);
    let u = Mask::disk(&g, [0.0, 0.0], 0.6);
    let inner = Mask::disk(&g, [0.0, 0.0], 0.3);
    assert!(RegionSpec::new(g, omega.clone(), u.clone(), inner.clone()).is_ok());
    // U touching the boundary of Ω
    assert!(RegionSpec::new(g, u.clone(), omega.clone(), inner.clone()).is_err());
    assert!(RegionSpec::new(g, omega, u.clone(), u).is_err());
}

#[test]
fn vortex_gradient_energy_on_annulus() {
    // ∫_{1/4 < r < 1} r⁻² dx = 2π ln 4
    let exact = 2.0 * PI * 4f64.ln();
    let mut errs = Vec::new();
    for n in [128, 256, 512] {
        let (g, m) = vortex_on(n);
        let ann = Mask::annulus(&g, [0.0, 0.0], 0.25, 1.0);
        let e = lp_norm(&gradient_norm(&m, &ann).unwrap(), 2.0, &ann).unwrap().powi(2);
        errs.push((e / exact - 1.0).abs());
    }
    assert!(errs[2] < errs[0], "{errs:?}");
    assert!(errs[1] < 5e-3 && errs[2] < 5e-3, "{errs:?}");
}

#[test]
fn vortex_divergence_is_second_order() {
    let mut sups = Vec::new();
    for n in [128, 256, 512] {
        let (g, m) = vortex_on(n);
        let ann = Mask::annulus(&g, [0.0, 0.0], 0.25, 1.0);
        let d = divergence(&m, &ann).unwrap();
        sups.push(sup_on(&d, &ann.erode(1)));
    }
    for w in sups.windows(2) {
        assert!(w[0] / w[1] > 3.4, "{sups:?}");
    }
}

#[test]
fn wall_normal_component_is_continuous() {
    let g = Grid2::square(-1.0, 1.0, 32).unwrap();
    let kind = CanonicalKind::Wall { alpha: FRAC_PI_6, axis: Axis::Vertical, offset: 0.0 };
    let m = make_canonical_field(kind, &g, &Mask::full(&g)).unwrap();
    for k in 0..g.len() {
        let v = m.m(k);
        assert!((v[0] - FRAC_PI_6.cos()).abs() < 1e-15);
        assert!((v[1].abs() - 0.5).abs() < 1e-15);
    }
    assert!(!kind.is_smooth());
}

#[test]
fn vortex_center_on_a_cell_center_is_rejected() {
    let g = Grid2::square(-1.0, 1.0, 9).unwrap();
    let c = g.center(4, 4);
    assert!(make_canonical_field(CanonicalKind::Vortex { center: c }, &g, &Mask::full(&g)).is_err());
    assert!(make_canonical_field(CanonicalKind::Vortex { center: [3.0, 0.0] }, &g, &Mask::full(&g)).is_err());
}

#[test]
fn shift_beyond_the_region_is_empty() {
    let g = Grid2::square(0.0, 1.0, 8).unwrap();
    let f = ScalarField::constant(&g, &Mask::full(&g), 1.0);
    assert!(matches!(
        finite_difference(&f, Displacement::Cells(8, 0), FdMode::Difference),
        Err(Error::EmptyRegion(_))
    ));
}

#[test]
fn mollified_wall_keeps_its_total_variation() {
    let g = Grid2::square(-1.0, 1.0, 200).unwrap();
    let full = Mask::full(&g);
    for alpha in [0.3f64, 1.0, 1.5] {
        let jump = ScalarField::from_fn(&g, &full, |p| alpha.sin() * (p[0] - 0.013).signum());
        let s = mollify(&jump, 0.1).unwrap();
        let j = 100;
        let tv: f64 = (1..g.nx).map(|i| (s.values[g.idx(i, j)] - s.values[g.idx(i - 1, j)]).abs()).sum();
        assert!((tv - 2.0 * alpha.sin()).abs() < 1e-6, "{tv}");
    }
    assert!(mollify(&ScalarField::constant(&g, &full, 1.0), 0.001).is_err());
    assert!(mollify(&ScalarField::constant(&g, &full, 1.0), 5.0).is_err());
}

#[test]
fn repeated_mollification_is_smoother() {
    let g = Grid2::square(0.0, 1.0, 64).unwrap();
    let full = Mask::full(&g);
    let f = ScalarField::from_fn(&g, &full, |p| ((37.0 * p[0]).sin() * (53.0 * p[1]).cos()).signum());
    let grad_sup = |f: &ScalarField| {
        let d = finite_difference(f, Displacement::Cells(1, 0), FdMode::Difference).unwrap();
        sup_on(&d, &d.mask)
    };
    let once = mollify(&f, 0.05).unwrap();
    let twice = mollify(&once, 0.05).unwrap();
    assert!(grad_sup(&twice) <= grad_sup(&once));
}

#[test]
fn rescaled_wall_crosses_at_the_same_line() {
    let src = Grid2::square(-2.0, 2.0, 160).unwrap();
    let kind = CanonicalKind::MollifiedWall { alpha: 1.0, axis: Axis::Vertical, offset: 0.0, width: 0.2 };
    let m = make_canonical_field(kind, &src, &Mask::full(&src)).unwrap();
    let tgt = Grid2::square(-0.9, 0.9, 36).unwrap();
    let r = rescale_field(&m, 2.0, &tgt, &Mask::full(&tgt)).unwrap();
    for k in 0..tgt.len() {
        let x = tgt.center_of(k)[0];
        assert_eq!(r.m(k)[1] > 0.0, x > 0.0);
    }
    assert!(matches!(rescale_field(&m, 3.0, &tgt, &Mask::full(&tgt)), Err(Error::OutOfDomain { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn angle_fields_are_unit(thetas in prop::collection::vec(-50.0f64..50.0, 64)) {
        let g = Grid2::square(0.0, 1.0, 8).unwrap();
        let m = AngleField::new(g, Mask::full(&g), thetas).unwrap();
        for k in 0..g.len() {
            prop_assert!(m.theta[k] > -PI && m.theta[k] <= PI);
            let v = m.m(k);
            prop_assert!((v[0].hypot(v[1]) - 1.0).abs() <= 2.0 * f64::EPSILON);
        }
    }

    #[test]
    fn product_rule_on_random_fields(
        a in prop::collection::vec(-1.0f64..1.0, 100),
        b in prop::collection::vec(-1.0f64..1.0, 100),
        di in -3i64..=3,
        dj in -3i64..=3,
    ) {
        prop_assume!(di != 0 || dj != 0);
        let g = Grid2::square(0.0, 1.0, 10).unwrap();
        let full = Mask::full(&g);
        let f = ScalarField::new(g, full.clone(), a.clone()).unwrap();
        let h = ScalarField::new(g, full.clone(), b.clone()).unwrap();
        let fh = ScalarField::new(g, full, a.iter().zip(&b).map(|(x, y)| x * y).collect()).unwrap();
        let d = Displacement::Cells(di, dj);
        let dfh = finite_difference(&fh, d, FdMode::Difference).unwrap();
        let dh = finite_difference(&h, d, FdMode::Difference).unwrap();
        let df = finite_difference(&f, d, FdMode::Difference).unwrap();
        let th = finite_difference(&h, d, FdMode::Translate).unwrap();
        for k in (0..g.len()).filter(|&k| dfh.mask.get(k)) {
            let rhs = f.values[k] * dh.values[k] + th.values[k] * df.values[k];
            prop_assert!((dfh.values[k] - rhs).abs() <= 1e-15);
        }
    }

    #[test]
    fn constant_scaling_of_norms(c in -5.0f64..5.0, p in 1.0f64..8.0) {
        let g = Grid2::square(0.0, 2.0, 16).unwrap();
        let r = Mask::rect(&g, [0.25, 0.25], [1.75, 1.25]);
        let f = ScalarField::constant(&g, &Mask::full(&g), c);
        let area = r.count() as f64 * g.cell_area();
        let n = lp_norm(&f, p, &r).unwrap();
        prop_assert!((n - c.abs() * area.powf(1.0 / p)).abs() <= 1e-12 * (1.0 + c.abs()));
    }
}
