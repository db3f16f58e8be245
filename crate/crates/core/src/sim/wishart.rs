//! Eigenvalues of real and quaternionic Wishart matrices and their joint
//! densities in the `α = −log λ / log ρ` coordinates.

use rand::Rng;
use serde::Serialize;

use crate::channel::{paired_eigenvalues, quaternion_lift, Mode};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, ComplexMatrix};
use crate::rng::{complex_gaussian_matrix, real_gaussian_matrix};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenProfile {
    /// Descending, positive.
    pub lambdas: Vec<f64>,
    /// `−ln λ_i / ln ρ`, ascending.
    pub alphas: Vec<f64>,
    pub l: usize,
    pub delta: usize,
    pub rho: f64,
}

impl EigenProfile {
    /// Sorts `lambdas` descending and clamps them away from zero.
    pub fn new(mut lambdas: Vec<f64>, delta: usize, rho: f64) -> Self {
        lambdas.sort_by(|a, b| b.total_cmp(a));
        for l in &mut lambdas {
            *l = l.max(f64::MIN_POSITIVE);
        }
        let lr = rho.ln();
        let alphas = lambdas.iter().map(|l| -l.ln() / lr).collect();
        EigenProfile {
            l: lambdas.len(),
            lambdas,
            alphas,
            delta,
            rho,
        }
    }
}

/// `(l, Δ)` for a mode: `(min(2m, n), |n − 2m|)` or `(min(m, p), |p − m|)`.
pub fn profile_shape(mode: Mode, n: usize, m: usize) -> Result<(usize, usize)> {
    match mode {
        Mode::Real => Ok(((2 * m).min(n), n.abs_diff(2 * m))),
        Mode::Quaternion => {
            if !n.is_multiple_of(2) {
                return Err(Error::InvalidParameter(format!("quaternionic mode needs even n, got {n}")));
            }
            let p = n / 2;
            Ok((m.min(p), p.abs_diff(m)))
        }
    }
}

fn top_eigenvalues(h: &ComplexMatrix, l: usize) -> Result<Vec<f64>> {
    let g = if h.rows() < h.cols() {
        h.conj_transpose().gram()
    } else {
        h.gram()
    };
    let mut eig = hermitian_eigenvalues(&g)?;
    eig.truncate(l);
    Ok(eig)
}

/// Nonzero eigenvalues of `HᵀH` for a real `2m x n` channel with N(0, 1/2)
/// entries.
pub fn sample_wishart_real<R: Rng + ?Sized>(n: usize, m: usize, rho: f64, rng: &mut R) -> Result<EigenProfile> {
    let (l, delta) = profile_shape(Mode::Real, n, m)?;
    let h = real_gaussian_matrix(rng, 2 * m, n);
    Ok(EigenProfile::new(top_eigenvalues(&h, l)?, delta, rho))
}

/// Distinct eigenvalues of `H†H` for the lift of `(H₁ H₂)`, with `H₁`, `H₂`
/// complex `m x p` of unit variance.
pub fn sample_wishart_quaternion<R: Rng + ?Sized>(p: usize, m: usize, rho: f64, rng: &mut R) -> Result<EigenProfile> {
    let (l, delta) = profile_shape(Mode::Quaternion, 2 * p, m)?;
    let h = complex_gaussian_matrix(rng, m, 2 * p);
    let lifted = quaternion_lift(&h)?;
    let g = if m < p {
        lifted.conj_transpose().gram()
    } else {
        lifted.gram()
    };
    let eig = hermitian_eigenvalues(&g)?;
    let mut distinct = paired_eigenvalues(&eig)?;
    distinct.truncate(l);
    Ok(EigenProfile::new(distinct, delta, rho))
}

/// Unnormalized log density of the ordered eigenvalues. `None` when two
/// eigenvalues coincide.
pub fn log_density(mode: Mode, lambdas: &[f64], delta: usize) -> Option<f64> {
    let (power, vander) = match mode {
        Mode::Real => ((delta as f64 - 1.0) / 2.0, 1.0),
        Mode::Quaternion => (2.0 * delta as f64 + 1.0, 4.0),
    };
    let mut acc = 0.0;
    for (i, &a) in lambdas.iter().enumerate() {
        acc += -a + power * a.ln();
        for &b in &lambdas[i + 1..] {
            let gap = (a - b).abs();
            if gap == 0.0 {
                return None;
            }
            acc += vander * gap.ln();
        }
    }
    Some(acc)
}

fn check_profile(mode: Mode, p: &EigenProfile, n: usize, m: usize) -> Result<()> {
    let (l, delta) = profile_shape(mode, n, m)?;
    if p.l != l || p.lambdas.len() != l || p.delta != delta {
        return Err(Error::Dimension(format!(
            "profile has l={} delta={}, expected l={l} delta={delta}",
            p.l, p.delta
        )));
    }
    Ok(())
}

/// `log p(λ_a) − log p(λ_b)` for the real Wishart eigenvalue density.
/// Returns `−∞` if either profile has a repeated eigenvalue.
pub fn density_ratio_check_real(a: &EigenProfile, b: &EigenProfile, n: usize, m: usize) -> Result<f64> {
    density_ratio(Mode::Real, a, b, n, m)
}

/// Quaternionic twin of [`density_ratio_check_real`]; `n = 2p`.
pub fn density_ratio_check_quaternion(a: &EigenProfile, b: &EigenProfile, n: usize, m: usize) -> Result<f64> {
    density_ratio(Mode::Quaternion, a, b, n, m)
}

fn density_ratio(mode: Mode, a: &EigenProfile, b: &EigenProfile, n: usize, m: usize) -> Result<f64> {
    check_profile(mode, a, n, m)?;
    check_profile(mode, b, n, m)?;
    match (log_density(mode, &a.lambdas, a.delta), log_density(mode, &b.lambdas, b.delta)) {
        (Some(x), Some(y)) => Ok(x - y),
        _ => Ok(f64::NEG_INFINITY),
    }
}

/// Exponents `N_i` of the dominating density, 1-based `i`.
pub fn dominating_exponents(mode: Mode, l: usize, delta: usize) -> Vec<f64> {
    (1..=l)
        .map(|i| {
            let base = (delta + 2 * l + 1) as f64 - 2.0 * i as f64;
            match mode {
                Mode::Real => base / 2.0,
                Mode::Quaternion => 2.0 * base,
            }
        })
        .collect()
}

/// Unnormalized log density of `α` (ascending), without the `(log ρ)^l K`
/// factor shared with [`log_p_prime`].
pub fn log_p_alpha(mode: Mode, alphas: &[f64], delta: usize, rho: f64) -> f64 {
    let lr = rho.ln();
    let (own, vander) = match mode {
        Mode::Real => ((delta as f64 + 1.0) / 2.0, 1.0),
        Mode::Quaternion => (2.0 * (delta as f64 + 1.0), 4.0),
    };
    let mut acc = 0.0;
    for (i, &a) in alphas.iter().enumerate() {
        acc += -(-a * lr).exp() - own * a * lr;
        for &b in &alphas[i + 1..] {
            let gap = (-a * lr).exp() - (-b * lr).exp();
            acc += vander * gap.max(0.0).ln();
        }
    }
    acc
}

/// Log of the dominating density `e^{−Σ ρ^{−α_i}} ρ^{−Σ N_i α_i}`.
pub fn log_p_prime(mode: Mode, alphas: &[f64], delta: usize, rho: f64) -> f64 {
    let lr = rho.ln();
    let n = dominating_exponents(mode, alphas.len(), delta);
    alphas
        .iter()
        .zip(&n)
        .map(|(&a, &ni)| -(-a * lr).exp() - ni * a * lr)
        .sum()
}
