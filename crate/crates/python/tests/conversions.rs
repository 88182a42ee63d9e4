use gausskin::{from_matrix, parse_stepper, to_matrix};
use gausskin_core::Stepper;

#[test]
fn nested_lists_round_trip() {
    let rows = vec![vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]];
    let m = to_matrix(&rows).unwrap();
    assert_eq!(m.nrows(), 2);
    assert_eq!(m[(0, 2)], 3.0);
    assert_eq!(m[(1, 0)], 4.0);
    assert_eq!(from_matrix(&m), rows);
}

#[test]
fn ragged_or_empty_input_is_rejected() {
    assert!(to_matrix(&[vec![1.0, 2.0], vec![3.0]]).is_err());
    assert!(to_matrix(&[]).is_err());
    assert!(to_matrix(&[vec![]]).is_err());
}

#[test]
fn stepper_names() {
    assert_eq!(parse_stepper("midpoint").unwrap(), Stepper::Midpoint);
    assert_eq!(parse_stepper("magnus4").unwrap(), Stepper::Magnus4);
    assert!(parse_stepper("rk4").is_err());
}
