//! The Rayleigh block-fading MIMO channel and its real and quaternionic
//! equivalent forms.
//!
//! Received signal: `Y = sqrt(rho/n) H X + W` with `H` (m x n) and `W`
//! (m x n) i.i.d. unit-variance circularly symmetric complex Gaussian, and a
//! codeword `X` of size n x n (block length equals the transmit antenna
//! count). All information quantities are in bits.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Codebook;
use crate::linalg::{determinant, hermitian_eigenvalues, ComplexMatrix};
use crate::rng::complex_gaussian_matrix;

/// Tolerance on the quaternionic block predicate for channel matrices.
pub const STRUCTURE_TOL: f64 = 1e-10;
/// Largest relative gap accepted between the two members of an eigenvalue
/// pair of a quaternionic Gram matrix.
pub const PAIRING_TOL: f64 = 1e-8;

/// Codeword family, which selects the equivalent channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Real,
    Quaternion,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "real" => Ok(Mode::Real),
            "quaternion" | "quaternionic" => Ok(Mode::Quaternion),
            other => Err(Error::InvalidParameter(format!("unknown mode {other:?}"))),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Real => "real",
            Mode::Quaternion => "quaternion",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    /// Transmit antennas, also the block length.
    pub n: usize,
    /// Receive antennas.
    pub m: usize,
    /// Linear SNR.
    pub rho: f64,
    /// Multiplexing gain.
    pub r: f64,
}

impl SystemConfig {
    pub fn new(n: usize, m: usize, rho: f64, r: f64) -> Result<Self> {
        let cfg = SystemConfig { n, m, rho, r };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m == 0 {
            return Err(Error::InvalidParameter(format!(
                "antenna counts must be positive (n = {}, m = {})",
                self.n, self.m
            )));
        }
        if !(self.rho.is_finite() && self.rho > 0.0) {
            return Err(Error::InvalidParameter(format!("rho must be > 0, got {}", self.rho)));
        }
        if !(self.r.is_finite() && self.r >= 0.0) {
            return Err(Error::InvalidParameter(format!("r must be >= 0, got {}", self.r)));
        }
        if self.r > self.n.min(self.m) as f64 {
            return Err(Error::OutOfRange(format!(
                "r = {} exceeds min(m, n) = {}",
                self.r,
                self.n.min(self.m)
            )));
        }
        Ok(())
    }

    /// Half the transmit antenna count, for quaternionic codes.
    pub fn p(&self) -> Result<usize> {
        if !self.n.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "quaternionic mode needs even n, got {}",
                self.n
            )));
        }
        Ok(self.n / 2)
    }

    pub fn with_rho(&self, rho: f64) -> Self {
        SystemConfig { rho, ..*self }
    }
}

/// One channel use: channel matrix and noise, both m x n.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSample {
    pub h: ComplexMatrix,
    pub w: ComplexMatrix,
}

pub fn sample_channel<R: Rng + ?Sized>(cfg: &SystemConfig, rng: &mut R) -> ChannelSample {
    let h = complex_gaussian_matrix(rng, cfg.m, cfg.n);
    let w = complex_gaussian_matrix(rng, cfg.m, cfg.n);
    ChannelSample { h, w }
}

/// `Y = sqrt(rho/n) H X + W`.
pub fn apply_channel(cfg: &SystemConfig, s: &ChannelSample, xbar: &ComplexMatrix) -> Result<ComplexMatrix> {
    if xbar.rows() != cfg.n || xbar.cols() != cfg.n {
        return Err(Error::Dimension(format!(
            "codeword is {}x{}, expected {n}x{n}",
            xbar.rows(),
            xbar.cols(),
            n = cfg.n
        )));
    }
    let gain = (cfg.rho / cfg.n as f64).sqrt();
    s.h.try_mul(xbar)?.scale(gain).try_add(&s.w)
}

/// Stacks the real part above the imaginary part: an m x n complex matrix
/// becomes a 2m x n real one.
pub fn realify(m: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::vstack(&m.real_part(), &m.imag_part()).expect("same column count")
}

/// Lifts `(M1 M2)` (m x 2p) to `[[M1, M2], [-M2*, M1*]]` (2m x 2p).
pub fn quaternion_lift(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !m.cols().is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "quaternion lift needs an even column count, got {}",
            m.cols()
        )));
    }
    let p = m.cols() / 2;
    let m1 = m.block(0, 0, m.rows(), p);
    let m2 = m.block(0, p, m.rows(), p);
    ComplexMatrix::from_blocks(&m1, &m2, &(-&m2.conj()), &m1.conj())
}

/// Largest entrywise deviation from the `[[A, -B*], [B, A*]]` block form.
/// Rows and columns must both be even; blocks need not be square.
pub fn quaternionic_defect(x: &ComplexMatrix) -> Option<f64> {
    if !x.rows().is_multiple_of(2) || !x.cols().is_multiple_of(2) {
        return None;
    }
    let (h, w) = (x.rows() / 2, x.cols() / 2);
    let mut defect: f64 = 0.0;
    for i in 0..h {
        for j in 0..w {
            let a = x[(i, j)];
            let minus_b_conj = x[(i, j + w)];
            let b = x[(i + h, j)];
            let a_conj = x[(i + h, j + w)];
            defect = defect
                .max((a_conj - a.conj()).norm())
                .max((minus_b_conj + b.conj()).norm());
        }
    }
    Some(defect)
}

pub fn is_quaternionic(x: &ComplexMatrix, tol: f64) -> bool {
    quaternionic_defect(x).is_some_and(|d| d <= tol)
}

/// `½ log2 det(I + (rho/n) H Q Hᵀ)` for the real equivalent channel.
///
/// A covariance with trace above `n` is accepted with a warning.
pub fn mutual_info_real(h: &ComplexMatrix, q: &ComplexMatrix, rho: f64, n: usize) -> Result<f64> {
    if !q.is_square() || q.rows() != h.cols() {
        return Err(Error::Dimension(format!(
            "covariance is {}x{} for a channel with {} columns",
            q.rows(),
            q.cols(),
            h.cols()
        )));
    }
    if q.trace().re > n as f64 * (1.0 + 1e-12) {
        log::warn!("input covariance trace {} exceeds n = {n}", q.trace().re);
    }
    let hqh = h.try_mul(q)?.try_mul(&h.conj_transpose())?;
    let eig = hermitian_eigenvalues(&hqh)?;
    let snr = rho / n as f64;
    Ok(0.5 * eig.iter().map(|&l| (snr * l.max(0.0)).ln_1p()).sum::<f64>() / std::f64::consts::LN_2)
}

/// Same as [`mutual_info_real`] with `Q = I`, computed from the smaller Gram
/// matrix.
pub fn mutual_info_real_identity(h: &ComplexMatrix, rho: f64, n: usize) -> Result<f64> {
    let g = if h.rows() < h.cols() {
        h.conj_transpose().gram()
    } else {
        h.gram()
    };
    let eig = hermitian_eigenvalues(&g)?;
    let snr = rho / n as f64;
    Ok(0.5 * eig.iter().map(|&l| (snr * l.max(0.0)).ln_1p()).sum::<f64>() / std::f64::consts::LN_2)
}

/// Splits the descending spectrum of a quaternionic Gram matrix into its
/// pairs and returns one representative per pair.
pub fn paired_eigenvalues(eig: &[f64]) -> Result<Vec<f64>> {
    if !eig.len().is_multiple_of(2) {
        return Err(Error::Dimension(format!("odd spectrum length {}", eig.len())));
    }
    let scale = eig.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    let mut out = Vec::with_capacity(eig.len() / 2);
    for pair in eig.chunks_exact(2) {
        let gap = if scale > 0.0 {
            (pair[0] - pair[1]).abs() / scale
        } else {
            0.0
        };
        if gap >= PAIRING_TOL {
            return Err(Error::Pairing { gap });
        }
        out.push(0.5 * (pair[0] + pair[1]));
    }
    Ok(out)
}

/// `log2 det(I + rho H† H) = 2 Σ log2(1 + rho λ_i)` over the p distinct
/// eigenvalues of a quaternionic channel matrix.
pub fn capacity_quaternion(h: &ComplexMatrix, rho: f64) -> Result<f64> {
    match quaternionic_defect(h) {
        None => {
            return Err(Error::Structure(format!(
                "{}x{} matrix cannot be quaternionic",
                h.rows(),
                h.cols()
            )))
        }
        Some(d) if d > STRUCTURE_TOL * h.frobenius_norm().max(1.0) => {
            return Err(Error::Structure(format!("block defect {d:e}")));
        }
        Some(_) => {}
    }
    let eig = hermitian_eigenvalues(&h.gram())?;
    let distinct = paired_eigenvalues(&eig)?;
    Ok(2.0 * distinct.iter().map(|&l| (rho * l.max(0.0)).ln_1p()).sum::<f64>() / std::f64::consts::LN_2)
}

/// Same quantity through the full determinant; used to cross-check the
/// paired-eigenvalue route.
pub fn capacity_by_determinant(h: &ComplexMatrix, rho: f64) -> Result<f64> {
    let n = h.cols();
    let m = &ComplexMatrix::identity(n) + &h.gram().scale(rho);
    let det = determinant(&m)?;
    Ok(det.re.log2())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerReport {
    pub average: f64,
    pub pass: bool,
}

/// Average power `(1/|C|)(1/n²) Σ ‖X‖²` and whether it is at most one.
pub fn power_check(cb: &Codebook) -> Result<PowerReport> {
    let points = cb.points();
    if points.is_empty() {
        return Err(Error::EmptyCodebook);
    }
    let n = points[0].rows() as f64;
    let total: f64 = points.iter().map(|x| x.frobenius_norm_sqr()).sum();
    let average = total / points.len() as f64 / (n * n);
    Ok(PowerReport {
        average,
        pass: average <= 1.0 + 1e-12,
    })
}

/// Builds a quaternionic codeword `[[A, -B*], [B, A*]]` from its blocks.
pub fn quaternionic_matrix(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    ComplexMatrix::from_blocks(a, &(-&b.conj()), b, &a.conj())
}
