//! Block error rate of lattice codebooks under exhaustive ML decoding.
//!
//! Decoding runs on the physical `m x n` channel. For real codewords this is
//! the same decision as on the stacked real channel, and for quaternionic
//! codewords the lifted distances are exactly twice the physical ones, so
//! the ML decision is unchanged either way.

use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;

use crate::channel::{Mode, SystemConfig};
use crate::error::{Error, Result};
use crate::lattice::{fixed_codebook, shape_codebook_capped, Codebook, Flavor, MatrixLattice, DEFAULT_POINT_CAP};
use crate::linalg::ComplexMatrix;
use crate::rng::{complex_gaussian, complex_gaussian_matrix};
use crate::sim::db_to_linear;
use crate::sim::engine::count_events;
use crate::sim::outage::{check_grid, check_mode};
use crate::sim::report::{Quantity, SimulationResult};
use crate::sim::slope::{SlopeEstimate, SlopeWeighting};

/// Cap on codeword pairs visited by [`min_received_distance`].
pub const PAIR_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorOptions {
    /// Multiplies the noise; zero gives a noiseless channel.
    pub noise_scale: f64,
    /// Codebook size when `r = 0`.
    pub codebook_size: usize,
    /// Enumeration cap for shaped codebooks.
    pub cap: u64,
}

impl Default for ErrorOptions {
    fn default() -> Self {
        ErrorOptions {
            noise_scale: 1.0,
            codebook_size: 16,
            cap: DEFAULT_POINT_CAP,
        }
    }
}

fn expected_flavor(mode: Mode) -> Flavor {
    match mode {
        Mode::Real => Flavor::Real,
        Mode::Quaternion => Flavor::Quaternionic,
    }
}

/// `H X` with `H` m x n and `X` n x n, both row-major.
fn mul_into(h: &[Complex64], x: &[Complex64], m: usize, n: usize, out: &mut [Complex64]) {
    for i in 0..m {
        for j in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                acc += h[i * n + k] * x[k * n + j];
            }
            out[i * n + j] = acc;
        }
    }
}

/// Empirical ML block error rate on each SNR of the grid.
///
/// With `r > 0` the codebook is `shape_codebook(lattice, ρ, r)` at every
/// SNR; with `r = 0` one fixed codebook of `options.codebook_size` points is
/// used throughout.
pub fn estimate_error_prob(
    mode: Mode,
    lattice: &Arc<MatrixLattice>,
    cfg: &SystemConfig,
    snr_grid_db: &[f64],
    trials: u64,
    seed: u64,
    options: &ErrorOptions,
) -> Result<SimulationResult> {
    check_grid(snr_grid_db, trials)?;
    check_mode(mode, cfg)?;
    if lattice.flavor() != expected_flavor(mode) {
        return Err(Error::InvalidParameter(format!(
            "{mode} mode needs a {} lattice, got {}",
            expected_flavor(mode),
            lattice.flavor()
        )));
    }
    if lattice.ambient_n() != cfg.n {
        return Err(Error::Dimension(format!(
            "lattice lives in {0}x{0} matrices but n = {1}",
            lattice.ambient_n(),
            cfg.n
        )));
    }
    if !(options.noise_scale >= 0.0) {
        return Err(Error::InvalidParameter("noise scale must be >= 0".into()));
    }
    let fixed = if cfg.r == 0.0 {
        Some(fixed_codebook(lattice, options.codebook_size)?)
    } else {
        None
    };
    let mut events = Vec::with_capacity(snr_grid_db.len());
    let mut rate_bits = Vec::with_capacity(snr_grid_db.len());
    for (job, &db) in snr_grid_db.iter().enumerate() {
        let rho = db_to_linear(db);
        let cb = match &fixed {
            Some(cb) => cb.clone(),
            None => shape_codebook_capped(lattice, rho, cfg.r, options.cap)?,
        };
        if cb.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "codebook at {db} dB has {} point(s); raise the SNR or r",
                cb.len()
            )));
        }
        rate_bits.push(cb.rate_bits());
        events.push(count_block_errors(&cb, cfg.m, rho, trials, seed, job as u64, options.noise_scale)?);
    }
    let trials_v = vec![trials; snr_grid_db.len()];
    Ok(SimulationResult {
        quantity: Quantity::Error,
        mode,
        n: cfg.n,
        m: cfg.m,
        r: cfg.r,
        seed,
        rate_bits,
        estimate: SlopeEstimate::from_counts(snr_grid_db, &trials_v, &events, SlopeWeighting::Uniform),
    })
}

fn count_block_errors(cb: &Codebook, m: usize, rho: f64, trials: u64, seed: u64, job: u64, noise: f64) -> Result<u64> {
    let n = cb.points()[0].rows();
    let words: Vec<&[Complex64]> = cb.points().iter().map(|p| p.entries()).collect();
    let size = words.len();
    let gain = (rho / n as f64).sqrt();
    let block = m * n;
    count_events(trials, seed, job, |rng| {
        let h = complex_gaussian_matrix(rng, m, n);
        let sent = rng.random_range(0..size);
        let mut hx = vec![Complex64::new(0.0, 0.0); size * block];
        for (j, w) in words.iter().enumerate() {
            mul_into(h.entries(), w, m, n, &mut hx[j * block..(j + 1) * block]);
        }
        let mut y = vec![Complex64::new(0.0, 0.0); block];
        for (i, v) in y.iter_mut().enumerate() {
            *v = hx[sent * block + i] * gain + complex_gaussian(rng) * noise;
        }
        let mut best = (f64::INFINITY, 0);
        for j in 0..size {
            let d: f64 = (0..block).map(|i| (y[i] - hx[j * block + i] * gain).norm_sqr()).sum();
            if d < best.0 {
                best = (d, j);
            }
        }
        Ok(best.1 != sent)
    })
}

/// `ρ · min ‖H (X − X')‖²` over distinct codeword pairs.
pub fn min_received_distance(h: &ComplexMatrix, cb: &Codebook, rho: f64) -> Result<f64> {
    let pts = cb.points();
    if pts.len() < 2 {
        return Err(Error::InvalidParameter("need at least 2 codewords".into()));
    }
    if h.cols() != pts[0].rows() {
        return Err(Error::Dimension(format!(
            "channel has {} columns, codewords have {} rows",
            h.cols(),
            pts[0].rows()
        )));
    }
    let pairs = (pts.len() as u64) * (pts.len() as u64 - 1) / 2;
    if pairs > PAIR_CAP {
        return Err(Error::ResourceCap {
            what: "codeword pairs",
            estimate: pairs,
            cap: PAIR_CAP,
        });
    }
    let images: Vec<ComplexMatrix> = pts.iter().map(|p| h * p).collect();
    let mut best = f64::INFINITY;
    for i in 0..images.len() {
        for j in i + 1..images.len() {
            best = best.min((&images[i] - &images[j]).frobenius_norm_sqr());
        }
    }
    Ok(rho * best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_hamilton_order, build_split_order};
    use crate::rng::substream;

    #[test]
    fn noiseless_channel_decodes_exactly() {
        let h = Arc::new(build_hamilton_order());
        let cfg = SystemConfig::new(2, 1, 1.0, 0.0).unwrap();
        let opts = ErrorOptions {
            noise_scale: 0.0,
            ..ErrorOptions::default()
        };
        let res = estimate_error_prob(Mode::Quaternion, &h, &cfg, &[0.0, 10.0], 20_000, 1, &opts).unwrap();
        assert_eq!(res.estimate.events, vec![0, 0]);
        let s = Arc::new(build_split_order());
        let cfg = SystemConfig::new(2, 1, 1.0, 0.5).unwrap();
        let res = estimate_error_prob(Mode::Real, &s, &cfg, &[20.0], 5_000, 1, &opts).unwrap();
        assert_eq!(res.estimate.events, vec![0]);
    }

    #[test]
    fn deterministic_per_seed() {
        let h = Arc::new(build_hamilton_order());
        let cfg = SystemConfig::new(2, 1, 1.0, 0.0).unwrap();
        let opts = ErrorOptions::default();
        let a = estimate_error_prob(Mode::Quaternion, &h, &cfg, &[6.0, 9.0], 20_000, 8, &opts).unwrap();
        let b = estimate_error_prob(Mode::Quaternion, &h, &cfg, &[6.0, 9.0], 20_000, 8, &opts).unwrap();
        assert_eq!(a, b);
        assert!(a.estimate.events[0] > a.estimate.events[1]);
        assert_eq!(a.rate_bits, vec![2.0, 2.0]);
    }

    #[test]
    fn mode_and_lattice_must_agree() {
        let h = Arc::new(build_hamilton_order());
        let cfg = SystemConfig::new(2, 1, 1.0, 0.0).unwrap();
        let opts = ErrorOptions::default();
        assert!(estimate_error_prob(Mode::Real, &h, &cfg, &[10.0], 10, 1, &opts).is_err());
        let cfg4 = SystemConfig::new(4, 1, 1.0, 0.0).unwrap();
        assert!(estimate_error_prob(Mode::Quaternion, &h, &cfg4, &[10.0], 10, 1, &opts).is_err());
        // shaped codebook at low SNR holds only the origin
        let cfg = SystemConfig::new(2, 1, 1.0, 0.5).unwrap();
        assert!(estimate_error_prob(Mode::Quaternion, &h, &cfg, &[0.0], 10, 1, &opts).is_err());
    }

    #[test]
    fn min_distance_examples() {
        let cb = Codebook::from_points(vec![ComplexMatrix::zeros(2, 2), ComplexMatrix::identity(2).scale(0.5f64.sqrt())]).unwrap();
        assert_eq!(min_received_distance(&ComplexMatrix::zeros(2, 2), &cb, 2.0).unwrap(), 0.0);
        let d = min_received_distance(&ComplexMatrix::identity(2), &cb, 2.0).unwrap();
        assert!((d - 2.0).abs() < 1e-12);
        let lone = Codebook::from_points(vec![ComplexMatrix::zeros(2, 2)]).unwrap();
        assert!(min_received_distance(&ComplexMatrix::identity(2), &lone, 2.0).is_err());
    }

    #[test]
    fn min_distance_is_quadratic_in_channel() {
        let lat = Arc::new(build_hamilton_order());
        let cb = crate::lattice::shape_codebook(&lat, 100.0, 0.5).unwrap();
        let mut rng = substream(5, 0);
        let h = complex_gaussian_matrix(&mut rng, 1, 2);
        let a = min_received_distance(&h, &cb, 100.0).unwrap();
        let b = min_received_distance(&h.scale(3.0), &cb, 100.0).unwrap();
        assert!((b - 9.0 * a).abs() < 1e-9 * b);
    }
}
