//! Eigenvalue bounds on received distances.

use serde::Serialize;

use crate::channel::paired_eigenvalues;
use crate::error::{Error, Result};
use crate::lattice::{Codebook, Flavor};
use crate::linalg::{hermitian_eigenvalues, ComplexMatrix};
use crate::sim::error_rate::PAIR_CAP;

/// Checks `tr(H ΔX ΔX† H†) ≥ Σ μ_i λ_i` with `λ` descending eigenvalues of
/// `H†H` and `μ` ascending eigenvalues of `ΔX ΔX†`.
pub fn check_mismatched_bound(h: &ComplexMatrix, dx: &ComplexMatrix) -> Result<bool> {
    if h.cols() != dx.rows() || !dx.is_square() {
        return Err(Error::Dimension(format!(
            "channel {}x{} with difference {}x{}",
            h.rows(),
            h.cols(),
            dx.rows(),
            dx.cols()
        )));
    }
    let lhs = h.try_mul(dx)?.frobenius_norm_sqr();
    let lambda = hermitian_eigenvalues(&h.gram())?;
    let mut mu = hermitian_eigenvalues(&dx.conj_transpose().gram())?;
    mu.reverse();
    let rhs: f64 = lambda.iter().zip(&mu).map(|(l, m)| l * m).sum();
    Ok(lhs >= rhs - 1e-9 * (1.0 + rhs.abs()))
}

/// Which right-hand side the product bound is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NvdConstant {
    /// `(4 M²)^{−(d−k)}`, implied by `det ≥ 1` and `μ_j ≤ ‖ΔX‖² ≤ 4M²`.
    Rigorous,
    /// `ρ^{−2r(d−k)/n}` with no constant.
    Literal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NvdViolation {
    pub pair: (usize, usize),
    /// 1-based index of the failing partial product; 0 flags the
    /// eigenvalue upper bound.
    pub k: usize,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NvdReport {
    pub pass: bool,
    pub pairs: u64,
    /// Smallest `lhs / rhs` seen over all pairs and `k`.
    pub worst_ratio: f64,
    pub counterexample: Option<NvdViolation>,
}

/// Partial products of the smallest eigenvalues of `ΔX ΔX†` over every
/// pair of unscaled codewords.
///
/// For quaternionic lattices each eigenvalue comes in a pair and `d = n/2`
/// distinct values are used; otherwise `d = n`. Every eigenvalue is also
/// checked against `4M²`.
pub fn check_nvd_product_bound(cb: &Codebook, constant: NvdConstant) -> Result<NvdReport> {
    let pts = cb.unscaled_points();
    if pts.len() < 2 {
        return Err(Error::InvalidParameter("need at least 2 codewords".into()));
    }
    let pairs = (pts.len() as u64) * (pts.len() as u64 - 1) / 2;
    if pairs > PAIR_CAP {
        return Err(Error::ResourceCap {
            what: "codeword pairs",
            estimate: pairs,
            cap: PAIR_CAP,
        });
    }
    let quaternionic = cb.source().is_some_and(|l| l.flavor() == Flavor::Quaternionic);
    let n = pts[0].rows() as f64;
    let m2 = cb.radius_m() * cb.radius_m();
    let mu_cap = 4.0 * m2 * (1.0 + 1e-6);
    let (rho, r) = (cb.rho(), cb.r());

    let mut worst = f64::INFINITY;
    let mut counterexample = None;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let dx = &pts[i] - &pts[j];
            let eig = hermitian_eigenvalues(&dx.conj_transpose().gram())?;
            let mut mu = if quaternionic { paired_eigenvalues(&eig)? } else { eig };
            mu.reverse();
            let d = mu.len();
            if let Some(&top) = mu.last() {
                if top > mu_cap && counterexample.is_none() {
                    counterexample = Some(NvdViolation {
                        pair: (i, j),
                        k: 0,
                        lhs: top,
                        rhs: 4.0 * m2,
                    });
                }
            }
            let mut prod = 1.0;
            for k in 1..=d {
                prod *= mu[k - 1].max(0.0);
                let gap = (d - k) as f64;
                let rhs = match constant {
                    NvdConstant::Rigorous => (4.0 * m2).powf(-gap),
                    NvdConstant::Literal => rho.powf(-2.0 * r * gap / n),
                };
                let ratio = prod / rhs;
                worst = worst.min(ratio);
                if prod < rhs * (1.0 - 1e-6) && counterexample.is_none() {
                    counterexample = Some(NvdViolation {
                        pair: (i, j),
                        k,
                        lhs: prod,
                        rhs,
                    });
                }
            }
        }
    }
    Ok(NvdReport {
        pass: counterexample.is_none(),
        pairs,
        worst_ratio: worst,
        counterexample,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_hamilton_order, build_split_order, shape_codebook, MatrixLattice};
    use crate::rng::{complex_gaussian_matrix, real_gaussian_matrix, substream};
    use std::sync::Arc;

    #[test]
    fn mismatched_examples() {
        let h = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 0.5, -1.0]).unwrap();
        assert!(check_mismatched_bound(&h, &ComplexMatrix::zeros(2, 2)).unwrap());
        // rearrangement equality: λ = (9, 1), μ = (1, 4) ascending
        let hd = ComplexMatrix::from_real(2, 2, &[3.0, 0.0, 0.0, 1.0]).unwrap();
        let dd = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 2.0]).unwrap();
        let lhs = hd.try_mul(&dd).unwrap().frobenius_norm_sqr();
        assert_eq!(lhs, 9.0 * 1.0 + 1.0 * 4.0);
        assert!(check_mismatched_bound(&hd, &dd).unwrap());
        assert!(check_mismatched_bound(&h, &ComplexMatrix::zeros(3, 3)).is_err());
    }

    #[test]
    fn mismatched_bound_sweep() {
        let mut rng = substream(6, 0);
        for t in 0..10_000 {
            let n = 2 + t % 3;
            let (h, dx) = if t % 2 == 0 {
                (real_gaussian_matrix(&mut rng, 2, n), real_gaussian_matrix(&mut rng, n, n))
            } else {
                (complex_gaussian_matrix(&mut rng, 3, n), complex_gaussian_matrix(&mut rng, n, n))
            };
            assert!(check_mismatched_bound(&h, &dx).unwrap());
        }
    }

    #[test]
    fn nvd_bound_on_orders() {
        for l in [build_hamilton_order(), build_split_order()] {
            let cb = shape_codebook(&Arc::new(l), 100.0, 0.5).unwrap();
            let rep = check_nvd_product_bound(&cb, NvdConstant::Rigorous).unwrap();
            assert!(rep.pass, "{rep:?}");
            assert!(rep.worst_ratio >= 1.0 - 1e-9);
        }
        let cb = shape_codebook(&Arc::new(build_hamilton_order()), 100.0, 0.5).unwrap();
        assert!(check_nvd_product_bound(&cb, NvdConstant::Literal).unwrap().pass);
    }

    #[test]
    fn constant_free_bound_fails_for_split_order() {
        let cb = shape_codebook(&Arc::new(build_split_order()), 100.0, 0.5).unwrap();
        let rep = check_nvd_product_bound(&cb, NvdConstant::Literal).unwrap();
        assert!(!rep.pass);
        let v = rep.counterexample.unwrap();
        assert_eq!(v.k, 1);
        assert!(rep.worst_ratio > 0.25 && rep.worst_ratio < 1.0);
    }

    #[test]
    fn singular_generator_is_caught() {
        let mk = |v: [f64; 4]| ComplexMatrix::from_real(2, 2, &v).unwrap();
        let basis = vec![
            mk([1.0, 0.0, 0.0, 1.0]),
            mk([1.0, 0.0, 0.0, 0.0]),
            mk([0.0, 1.0, 0.0, 0.0]),
            mk([0.0, 0.0, 1.0, 0.0]),
        ];
        let lat = Arc::new(MatrixLattice::new(2, basis, Flavor::Real).unwrap());
        let cb = shape_codebook(&lat, 100.0, 0.5).unwrap();
        let rep = check_nvd_product_bound(&cb, NvdConstant::Rigorous).unwrap();
        assert!(!rep.pass);
        let v = rep.counterexample.unwrap();
        assert!(v.lhs.abs() < 1e-12);
    }
}
