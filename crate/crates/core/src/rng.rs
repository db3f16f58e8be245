//! Counter-derived random substreams.
//!
//! Every parallel work unit draws from its own ChaCha stream, selected by a
//! stream id derived from its position in the job rather than from the
//! worker that happens to run it. Results are therefore bit-identical for
//! any thread count.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::ComplexMatrix;

pub type SimRng = ChaCha8Rng;

pub fn substream(root_seed: u64, stream_id: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(root_seed);
    rng.set_stream(stream_id);
    rng
}

/// Stream id for chunk `chunk` of job `job` (e.g. one SNR point).
pub fn stream_id(job: u64, chunk: u64) -> u64 {
    (job << 32) | (chunk & 0xffff_ffff)
}

/// Circularly symmetric complex Gaussian with unit total variance.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn complex_gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Real matrix with i.i.d. N(0, 1/2) entries.
pub fn real_gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let x: f64 = rng.sample(StandardNormal);
        Complex64::new(x * std::f64::consts::FRAC_1_SQRT_2, 0.0)
    })
}
