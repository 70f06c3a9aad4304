use otdcov::testkit::Space;
use otdcov_cli::dataset::parse_dataset;

#[test]
fn parses_and_reorders_columns() {
    let text = "y1,x2,x1\n3,2,1\n6, 5 ,4\n";
    let d = parse_dataset(text, 2, 1, Space::Euclidean).unwrap();
    assert_eq!(d.x, vec![vec![1.0, 2.0], vec![4.0, 5.0]]);
    assert_eq!(d.y, vec![vec![3.0], vec![6.0]]);
}

#[test]
fn errors_name_the_line() {
    let err = parse_dataset("x1,y1\n1,2\n3,abc\n", 1, 1, Space::Euclidean).unwrap_err();
    assert!(err.message().contains("line 3"), "{}", err.message());
    let err = parse_dataset("x1,y1\n1,2\n3\n", 1, 1, Space::Euclidean).unwrap_err();
    assert!(err.message().contains("line 3"), "{}", err.message());
    assert!(parse_dataset("x1,y2\n1,2\n", 1, 1, Space::Euclidean).is_err());
    assert!(parse_dataset("x1,y1\n", 1, 1, Space::Euclidean).is_err());
    assert!(parse_dataset("x1,y1\n1,inf\n", 1, 1, Space::Euclidean).is_err());
}

#[test]
fn sphere_tolerance_split() {
    let ok = parse_dataset("x1,x2,y1,y2\n1,0,0,1\n", 2, 2, Space::Sphere).unwrap();
    assert!(ok.warnings.is_empty());
    let warn = parse_dataset("x1,x2,y1,y2\n1.0005,0,0,1\n", 2, 2, Space::Sphere).unwrap();
    assert_eq!(warn.warnings.len(), 1);
    assert!((warn.x[0][0] - 1.0).abs() < 1e-15);
    let err = parse_dataset("x1,x2,y1,y2\n1,0,0,0.5\n", 2, 2, Space::Sphere).unwrap_err();
    assert!(err.message().contains("line 2"));
    assert_eq!(err.exit_code(), 2);
}
