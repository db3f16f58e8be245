//! Parallel trial runner.
//!
//! Trials are cut into fixed-size chunks and chunk `c` of job `j` always
//! draws from substream `(j, c)` of the root seed, so counts do not depend
//! on the number of worker threads.

use rayon::prelude::*;

use crate::error::Result;
use crate::rng::{stream_id, substream, SimRng};

pub const CHUNK_TRIALS: u64 = 8192;
pub const THREADS_ENV: &str = "DMTLAB_THREADS";

/// Counts the trials for which `trial` returns true.
pub fn count_events<F>(trials: u64, seed: u64, job: u64, trial: F) -> Result<u64>
where
    F: Fn(&mut SimRng) -> Result<bool> + Sync,
{
    let chunks = trials.div_ceil(CHUNK_TRIALS);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = substream(seed, stream_id(job, c));
            let len = CHUNK_TRIALS.min(trials - c * CHUNK_TRIALS);
            let mut hits = 0u64;
            for _ in 0..len {
                if trial(&mut rng)? {
                    hits += 1;
                }
            }
            Ok(hits)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))
}

/// Sizes the global pool from `DMTLAB_THREADS` if set. Returns the number
/// of threads in use. Calling it after the pool exists has no effect.
pub fn configure_threads_from_env() -> usize {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    rayon::current_num_threads()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn coin(rng: &mut SimRng) -> Result<bool> {
        Ok(rng.random_bool(0.3))
    }

    #[test]
    fn thread_count_does_not_change_counts() {
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| count_events(50_000, 9, 2, coin)).unwrap();
        let b = four.install(|| count_events(50_000, 9, 2, coin)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, count_events(50_000, 9, 3, coin).unwrap());
        assert!((a as f64 / 50_000.0 - 0.3).abs() < 0.01);
    }

    #[test]
    fn partial_chunks_and_errors() {
        assert_eq!(count_events(10, 1, 0, |_| Ok(true)).unwrap(), 10);
        assert_eq!(count_events(CHUNK_TRIALS + 3, 1, 0, |_| Ok(true)).unwrap(), CHUNK_TRIALS + 3);
        assert_eq!(count_events(0, 1, 0, |_| Ok(true)).unwrap(), 0);
        let err = count_events(10, 1, 0, |_| Err(crate::Error::EmptyCodebook));
        assert!(err.is_err());
    }
}
