use mobius_center::{Error, FieldKind, QuadraticField, SimplicialPolytope, Vector};

#[test]
fn polytope_weights_default_to_one() {
    let p = SimplicialPolytope::from_json(
        r#"{"dim": 2, "vertices": [[0,0],[2,0],[0,2]],
            "facets": [{"indices": [0,1]}, {"indices": [1,2], "weight": 1}, {"indices": [2,0]}]}"#,
    )
    .unwrap();
    assert!(p.facets().iter().all(|f| f.weight == 1));
    assert!((p.volume() - 2.0).abs() < 1e-15);
}

#[test]
fn polytope_structure_is_checked() {
    let cases = [
        r#"{"dim": 2, "vertices": [[0,0],[1,0]], "facets": [{"indices": [0,0]}]}"#,
        r#"{"dim": 2, "vertices": [[0,0],[1,0]], "facets": [{"indices": [0,1,1]}]}"#,
        r#"{"dim": 2, "vertices": [[0,0],[1,0,3]], "facets": [{"indices": [0,1]}]}"#,
        r#"{"dim": 2, "vertices": [[0,0],[1,0]], "facets": [{"indices": [0,1], "weight": 0}]}"#,
        r#"{"dim": 1, "vertices": [[0],[1]], "facets": [{"indices": [0]}]}"#,
        r#"{"dim": 2, "vertices": [[0,0],[1,0]]}"#,
    ];
    for text in cases {
        assert!(SimplicialPolytope::from_json(text).is_err(), "{text}");
    }
}

#[test]
fn field_file_round_trips() {
    let text = r#"{"kind": "interpolating", "A": [[1, 2], [3, 4]], "b": [0.5, -0.5], "c": [1, 0]}"#;
    let f = QuadraticField::from_json(text).unwrap();
    assert_eq!(f.kind(), FieldKind::Interpolating);
    assert_eq!(f.b(), &Vector::from([0.5, -0.5]));
    assert_eq!(QuadraticField::from_json(&f.to_json()).unwrap(), f);
}

#[test]
fn field_file_enforces_mobius_constraint() {
    let ok = r#"{"kind": "mobius", "A": [[2, 1], [-1, 2]], "b": [0, 0], "c": [0, 0]}"#;
    assert!(QuadraticField::from_json(ok).is_ok());
    let bad = r#"{"kind": "mobius", "A": [[2, 1], [1, 2]], "b": [0, 0], "c": [0, 0]}"#;
    assert!(QuadraticField::from_json(bad).is_err());
    let unknown = r#"{"kind": "affine", "A": [[1, 0], [0, 1]], "b": [0, 0], "c": [0, 0]}"#;
    assert!(QuadraticField::from_json(unknown).is_err());
    let mismatched = r#"{"kind": "projective", "A": [[1, 0], [0, 1]], "b": [0, 0, 0], "c": [0, 0]}"#;
    assert!(matches!(
        QuadraticField::from_json(mismatched),
        Err(Error::DimensionMismatch { .. } | Error::Malformed(_))
    ));
}
