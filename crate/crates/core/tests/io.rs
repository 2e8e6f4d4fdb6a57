use eklab_core::io::{load_field, read_field, save_field, write_field, FieldData};
use eklab_core::*;
use proptest::prelude::*;

fn same_bits(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits() || (x.is_nan() && y.is_nan()))
}

#[test]
fn files_round_trip_every_kind() {
    let dir = tempfile::tempdir().unwrap();
    let g = Grid2::new(12, 9, -0.3, 1.7, 0.1, 1.0 / 3.0).unwrap();
    let mask = Mask::disk(&g, [0.3, 3.2], 0.45);
    let angle = make_canonical_field(CanonicalKind::Vortex { center: [0.31, 3.19] }, &g, &mask).unwrap();
    let scalar = ScalarField::from_fn(&g, &mask, |p| (p[0] * 1e-7).exp() / 3.0);
    let vector = angle.to_vector();
    for (name, f) in [
        ("a.ekf", FieldData::Angle(angle.clone())),
        ("s.ekf", FieldData::Scalar(scalar.clone())),
        ("v.ekf", FieldData::Vector(vector.clone())),
    ] {
        let path = dir.path().join(name);
        save_field(&path, &f).unwrap();
        let back = load_field(&path).unwrap();
        assert_eq!(back.kind(), f.kind());
        assert_eq!(back.grid(), f.grid());
        match (&f, &back) {
            (FieldData::Angle(a), FieldData::Angle(b)) => {
                assert_eq!(a.mask, b.mask);
                assert!(same_bits(&a.theta, &b.theta));
            }
            (FieldData::Scalar(a), FieldData::Scalar(b)) => {
                assert_eq!(a.mask, b.mask);
                assert!(same_bits(&a.values, &b.values));
            }
            (FieldData::Vector(a), FieldData::Vector(b)) => {
                assert_eq!(a.mask, b.mask);
                assert!(same_bits(&a.u, &b.u) && same_bits(&a.v, &b.v));
            }
            _ => unreachable!(),
        }
    }
}

#[test]
fn header_layout() {
    let g = Grid2::square(0.0, 1.0, 4).unwrap();
    let mut buf = Vec::new();
    write_field(&mut buf, &FieldData::Scalar(ScalarField::constant(&g, &Mask::rect(&g, [0.0, 0.0], [0.5, 1.0]), 0.1)))
        .unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "EKLAB-FIELD 1");
    assert!(lines[1].starts_with("scalar 4 4 "));
    assert_eq!(lines.len(), 6);
    assert_eq!(lines[2].split_whitespace().filter(|t| *t == "nan").count(), 2);
}

#[test]
fn malformed_files_are_rejected() {
    let body = "1 2 3 4\n".repeat(4);
    let cases = [
        format!("EKLAB-FIELD 2\nscalar 4 4 0 0 1 1\n{body}"),
        format!("EKLAB-FELD 1\nscalar 4 4 0 0 1 1\n{body}"),
        format!("EKLAB-FIELD 1\ntensor 4 4 0 0 1 1\n{body}"),
        format!("EKLAB-FIELD 1\nvector2 4 4 0 0 1 1\n{}", "1 2 3 4 5 6 7\n".repeat(4)),
        format!("EKLAB-FIELD 1\nscalar 4 4 0 0 1 1\n{}", "1 2 3 4\n".repeat(3)),
        format!("EKLAB-FIELD 1\nscalar 4 4 0 0 1 1\n{}1 2 inf 4\n", "1 2 3 4\n".repeat(3)),
        format!("EKLAB-FIELD 1\nscalar 4 4 0 0 -1 1\n{body}"),
    ];
    for c in &cases {
        assert!(matches!(read_field(c.as_bytes()), Err(Error::Format(_) | Error::InvalidGrid(_))), "{c}");
    }
    let v2 = format!("EKLAB-FIELD 2\nscalar 4 4 0 0 1 1\n{body}");
    assert!(matches!(read_field(v2.as_bytes()), Err(Error::Format(m)) if m.contains("version")));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn arbitrary_values_round_trip_bit_exactly(
        vals in prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO, 16),
    ) {
        let g = Grid2::square(-2.0, 2.0, 4).unwrap();
        let f = ScalarField::new(g, Mask::full(&g), vals.clone()).unwrap();
        let mut buf = Vec::new();
        write_field(&mut buf, &FieldData::Scalar(f)).unwrap();
        let FieldData::Scalar(b) = read_field(&buf[..]).unwrap() else { panic!("kind") };
        prop_assert!(same_bits(&vals, &b.values));
    }
}
