//! Shared fixtures for the benchmarks.

use toricount::sample::{random_systems, SystemShape};
use toricount::IntVector;

fn sys(rows: &[&[i64]]) -> Vec<IntVector> {
    rows.iter().map(|r| IntVector::from_i64s(r)).collect()
}

/// Named systems used across benchmarks.
pub fn fixtures() -> Vec<(&'static str, Vec<IntVector>)> {
    let mut out = vec![
        ("1d-112", sys(&[&[1], &[1], &[2]])),
        ("2d-example", sys(&[&[1, 0], &[0, 1], &[-1, 2]])),
        (
            "2d-five",
            sys(&[&[1, 0], &[0, 1], &[1, 1], &[1, 2], &[2, 1]]),
        ),
        (
            "3d-six",
            sys(&[
                &[1, 0, 0],
                &[0, 1, 0],
                &[0, 0, 1],
                &[1, 1, 0],
                &[0, 1, 1],
                &[1, 0, 1],
            ]),
        ),
    ];
    let shape = SystemShape::default();
    for (i, x) in random_systems(2024, 2, &shape).into_iter().enumerate() {
        out.push((["random-a", "random-b"][i], x));
    }
    out
}
