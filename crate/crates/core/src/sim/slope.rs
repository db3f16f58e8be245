//! Log-log slope fits of probability against SNR.

use serde::Serialize;

use crate::error::{Error, Result};

/// Points with fewer events than this are flagged and left out of fits.
pub const MIN_EVENTS: u64 = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SlopeWeighting {
    /// Ordinary least squares.
    #[default]
    Uniform,
    /// Weights proportional to the event count at each point.
    EventCount,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeEstimate {
    pub snr_db: Vec<f64>,
    pub probs: Vec<f64>,
    pub trials: Vec<u64>,
    pub events: Vec<u64>,
    /// Whether each point entered the fit.
    pub usable: Vec<bool>,
    /// Fitted `−Δ log10 P / Δ log10 ρ`; `None` with fewer than two usable points.
    pub slope: Option<f64>,
    /// Standard error of the slope; `None` when there are no residual
    /// degrees of freedom.
    pub stderr: Option<f64>,
    pub weighting: SlopeWeighting,
}

impl SlopeEstimate {
    /// Builds the estimate from raw counts; never fails.
    pub fn from_counts(snr_db: &[f64], trials: &[u64], events: &[u64], weighting: SlopeWeighting) -> Self {
        let probs: Vec<f64> = trials
            .iter()
            .zip(events)
            .map(|(&t, &e)| if t == 0 { 0.0 } else { e as f64 / t as f64 })
            .collect();
        let usable: Vec<bool> = events.iter().zip(&probs).map(|(&e, &p)| e >= MIN_EVENTS && p > 0.0).collect();
        let (slope, stderr) = regress(snr_db, &probs, events, &usable, weighting);
        SlopeEstimate {
            snr_db: snr_db.to_vec(),
            probs,
            trials: trials.to_vec(),
            events: events.to_vec(),
            usable,
            slope,
            stderr,
            weighting,
        }
    }

    pub fn usable_points(&self) -> usize {
        self.usable.iter().filter(|u| **u).count()
    }

    /// Binomial standard error of each probability.
    pub fn prob_stderr(&self) -> Vec<f64> {
        self.probs
            .iter()
            .zip(&self.trials)
            .map(|(&p, &t)| if t == 0 { 0.0 } else { (p * (1.0 - p) / t as f64).sqrt() })
            .collect()
    }
}

fn regress(
    snr_db: &[f64],
    probs: &[f64],
    events: &[u64],
    usable: &[bool],
    weighting: SlopeWeighting,
) -> (Option<f64>, Option<f64>) {
    let pts: Vec<(f64, f64, f64)> = (0..snr_db.len())
        .filter(|&i| usable[i])
        .map(|i| {
            let w = match weighting {
                SlopeWeighting::Uniform => 1.0,
                SlopeWeighting::EventCount => events[i] as f64,
            };
            (snr_db[i] / 10.0, -probs[i].log10(), w)
        })
        .collect();
    if pts.len() < 2 {
        return (None, None);
    }
    let sw: f64 = pts.iter().map(|p| p.2).sum();
    let mx = pts.iter().map(|p| p.2 * p.0).sum::<f64>() / sw;
    let my = pts.iter().map(|p| p.2 * p.1).sum::<f64>() / sw;
    let sxx: f64 = pts.iter().map(|p| p.2 * (p.0 - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return (None, None);
    }
    let sxy: f64 = pts.iter().map(|p| p.2 * (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let stderr = (pts.len() > 2).then(|| {
        let ssr: f64 = pts
            .iter()
            .map(|p| p.2 * (p.1 - my - slope * (p.0 - mx)).powi(2))
            .sum();
        (ssr / (pts.len() - 2) as f64 / sxx).sqrt()
    });
    (Some(slope), stderr)
}

/// Least-squares slope of `−log10 P` against `log10 ρ`.
///
/// Event counts are recovered as `round(prob · trials)`.
pub fn fit_slope(snr_db: &[f64], probs: &[f64], trials: &[u64], weighting: SlopeWeighting) -> Result<SlopeEstimate> {
    if snr_db.len() != probs.len() || probs.len() != trials.len() {
        return Err(Error::Dimension("snr, probability and trial lists differ in length".into()));
    }
    if let Some(p) = probs.iter().find(|p| !(**p >= 0.0 && **p <= 1.0)) {
        return Err(Error::OutOfRange(format!("probability {p} outside [0, 1]")));
    }
    let events: Vec<u64> = probs
        .iter()
        .zip(trials)
        .map(|(&p, &t)| (p * t as f64).round() as u64)
        .collect();
    let est = SlopeEstimate::from_counts(snr_db, trials, &events, weighting);
    // keep the caller's probabilities rather than the rounded ones
    let est = SlopeEstimate {
        probs: probs.to_vec(),
        ..est
    };
    let (slope, stderr) = regress(snr_db, &est.probs, &est.events, &est.usable, weighting);
    if slope.is_none() {
        return Err(Error::InsufficientPoints {
            usable: est.usable_points(),
        });
    }
    Ok(SlopeEstimate { slope, stderr, ..est })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    const T: u64 = 1_000_000;

    #[test]
    fn exact_lines() {
        let e = fit_slope(&[10.0, 20.0], &[1e-1, 1e-2], &[T, T], SlopeWeighting::Uniform).unwrap();
        assert!((e.slope.unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(e.stderr, None);
        let e = fit_slope(&[10.0, 20.0, 30.0], &[1e-1, 1e-2, 1e-3], &[T; 3], SlopeWeighting::Uniform).unwrap();
        assert!((e.slope.unwrap() - 1.0).abs() < 1e-12);
        assert!(e.stderr.unwrap() < 1e-12);
        let w = fit_slope(&[10.0, 20.0, 30.0], &[1e-1, 1e-2, 1e-3], &[T; 3], SlopeWeighting::EventCount).unwrap();
        assert!((w.slope.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn noisy_synthetic_slope() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let snr: Vec<f64> = (0..7).map(|i| 10.0 + 3.0 * i as f64).collect();
        let probs: Vec<f64> = snr
            .iter()
            .map(|db| 10f64.powf(-1.5 * db / 10.0) * (1.0 + rng.random_range(-0.05..0.05)))
            .collect();
        let trials = vec![100_000_000_000u64; snr.len()];
        let e = fit_slope(&snr, &probs, &trials, SlopeWeighting::Uniform).unwrap();
        assert!((e.slope.unwrap() - 1.5).abs() < 0.1);
    }

    #[test]
    fn sparse_points_are_flagged() {
        let e = SlopeEstimate::from_counts(&[10.0, 20.0, 30.0], &[1000, 1000, 1000], &[500, 60, 0], SlopeWeighting::Uniform);
        assert_eq!(e.usable, vec![true, true, false]);
        assert_eq!(e.probs[2], 0.0);
        assert!(e.slope.is_some());
        let r = fit_slope(&[10.0, 20.0], &[0.1, 0.0], &[1000, 1000], SlopeWeighting::Uniform);
        assert!(matches!(r, Err(Error::InsufficientPoints { usable: 1 })));
        assert!(fit_slope(&[10.0], &[1.5], &[10], SlopeWeighting::Uniform).is_err());
    }
}
