use otdcov::Error;
use otdcov_cli::CliError;

#[test]
fn user_errors_map_to_two() {
    for e in [
        Error::InvalidArgument("n".into()),
        Error::Domain("antipode".into()),
        Error::PoleCollision { side: "x", index: 3 },
    ] {
        assert_eq!(CliError::from(e).exit_code(), 2);
    }
}

#[test]
fn numerical_errors_map_to_three() {
    let e = CliError::from(Error::Numerical("no convergence".into()));
    assert_eq!(e.exit_code(), 3);
    assert!(e.message().contains("no convergence"));
}
