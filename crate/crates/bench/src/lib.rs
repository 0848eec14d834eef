//! Inputs shared by the benchmarks.

use quadtower::multiquad::{MqElement, MultiquadField};
use quadtower::quadratic::SquarefreeRadicand;

/// Rows of the published table, smallest and largest radicands first.
pub const TRIPLES: [(u64, u64, u64); 3] = [(13, 43, 3), (37, 67, 11), (29, 83, 67)];

/// Radicands whose units and class numbers dominate a table run.
pub fn radicands() -> Vec<SquarefreeRadicand> {
    [1677, 2 * 29 * 83, 29 * 83 * 67, 2 * 37 * 67]
        .into_iter()
        .map(|d| SquarefreeRadicand::new(d).expect("squarefree"))
        .collect()
}

/// A field of degree 8 and a dense element of it.
pub fn dense_element() -> (MultiquadField, MqElement) {
    let k = MultiquadField::new(&[26, 6, 43]).expect("independent");
    let beta = k.radicands().iter().enumerate().fold(MqElement::zero(), |acc, (i, &m)| {
        &acc + &MqElement::sqrt_of(m).scale_int(&(i as i64 * 7 - 20).into())
    });
    (k, beta)
}
