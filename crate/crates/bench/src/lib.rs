//! Fixed inputs shared by the benchmarks in `benches/`.

use idealcalc::operators::random_matrix;
use idealcalc::{Ensemble, Matrix, SearchBudget, Sequence};

pub const SEED: u64 = 0xbe7c;

pub fn matrix(n: usize) -> Matrix {
    random_matrix(SEED ^ n as u64, n, Ensemble::Gaussian)
}

/// `1, 1/2, ..., 1/len` in a scrambled order.
pub fn sequence(len: usize) -> Sequence {
    let v = (0..len)
        .map(|k| 1.0 / (((k * 7) % len) + 1) as f64)
        .collect();
    Sequence::new(v).expect("finite")
}

pub fn budget() -> SearchBudget {
    SearchBudget::new(8, 60, SEED).expect("positive budget")
}
