use std::f64::consts::PI;
use std::fs::File;

use strip_lab::{Error, PdeParams, ScalarField, StripGrid, VectorField};

#[test]
fn grid_examples() {
    let g = StripGrid::new(0.0, PI, 3, 3).unwrap();
    assert!((g.hy() - PI / 4.0).abs() < 1e-15);
    assert!((g.hx() - PI / 2.0).abs() < 1e-15);
    let g = StripGrid::new(-1.0, 1.0, 5, 3).unwrap();
    assert_eq!(g.node(2, 0), (0.0, 0.0));
    assert_eq!(g.node(4, 4), (1.0, PI));
    assert!(matches!(
        StripGrid::new(0.0, 1.0, 2, 3),
        Err(Error::InvalidBounds(_))
    ));
    assert!(StripGrid::new(1.0, 1.0, 5, 5).is_err());
    assert_eq!(g.node(3, 2), g.node(3, 2));
}

#[test]
fn sampling_examples() {
    let g = StripGrid::<f64>::new(-2.0, 2.0, 9, 7).unwrap();
    assert_eq!(ScalarField::sample(g, |_, _| 0.0).unwrap().max_abs(), 0.0);
    let s = ScalarField::sample(g, |_, y: f64| y.sin()).unwrap();
    for (i, j, _, y) in g.nodes() {
        assert_eq!(s.at(i, j), y.sin());
    }
    match ScalarField::sample(g, |x, _| 1.0 / x) {
        Err(Error::NonFinite { i, x, .. }) => {
            assert_eq!(i, 4);
            assert_eq!(x, 0.0);
        }
        other => panic!("expected a non-finite error, got {other:?}"),
    }
}

#[test]
fn csv_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let g = StripGrid::<f64>::new(-1.3, 2.9, 17, 11).unwrap();
    let f =
        ScalarField::sample(g, |x: f64, y: f64| (x * 7.1).sin() * (y * 3.3).exp() / 3.0).unwrap();
    let path = dir.path().join("field.csv");
    f.write_csv(File::create(&path).unwrap()).unwrap();
    let back = ScalarField::read_csv(g, File::open(&path).unwrap()).unwrap();
    assert_eq!(back, f);
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("x,y,value\n"));
    assert_eq!(text.lines().count(), g.len() + 1);

    let v = VectorField::sample(g, |x: f64, y: f64| (x.cos(), y / 7.0)).unwrap();
    let vp = dir.path().join("vec.csv");
    v.write_csv(File::create(&vp).unwrap()).unwrap();
    assert_eq!(
        VectorField::read_csv(g, File::open(&vp).unwrap()).unwrap(),
        v
    );
}

#[test]
fn params_validation() {
    assert!(PdeParams::new(1.0, -0.1).is_err());
    assert!(PdeParams::new(f64::NAN, 0.0).is_err());
    let p: PdeParams<f64> = serde_json::from_str(r#"{"k": 2.0, "lambda": 0.5}"#).unwrap();
    assert_eq!((p.k(), p.lambda()), (2.0, 0.5));
    assert!(serde_json::from_str::<PdeParams<f64>>(r#"{"k": 2.0, "lambda": -1}"#).is_err());
}

#[test]
fn single_precision_grid_and_field() {
    let g = StripGrid::<f32>::new(-1.0, 1.0, 9, 7).unwrap();
    let f = ScalarField::sample(g, |x, y| x * y).unwrap();
    assert!(f.max_abs() <= std::f32::consts::PI + 1e-6);
}
