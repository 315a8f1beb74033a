//! Seeded Haar-random vectors and unitaries.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{inner, normalize, ComplexMatrix, C64};

/// Generator for restart `stream` of a run seeded with `seed`. Streams are
/// independent, so restarts can run in any order.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<C64> {
    (0..n)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            C64::new(re, im)
        })
        .collect()
}

/// Haar-distributed unit vector in `C^n`.
pub fn haar_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<C64> {
    loop {
        if let Some(v) = normalize(&gaussian_vector(rng, n)) {
            return v;
        }
    }
}

/// Haar-distributed `n x n` unitary (Gram-Schmidt on a Ginibre matrix).
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v = gaussian_vector(rng, n);
        for _ in 0..2 {
            for e in &cols {
                let c = inner(e, &v);
                for (x, y) in v.iter_mut().zip(e) {
                    *x -= c * y;
                }
            }
        }
        if let Some(v) = normalize(&v) {
            cols.push(v);
        }
    }
    ComplexMatrix::from_columns(&cols).expect("square")
}

/// Random Hermitian matrix with Gaussian entries.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = ComplexMatrix::from_row_major(n, n, gaussian_vector(rng, n * n)).expect("shape");
    g.hermitian_part()
}
