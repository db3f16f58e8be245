//! Matrix lattices, shell enumeration and spherically shaped codebooks.
//!
//! Two built-in degree-2 orders are provided: the Lipschitz order of
//! Hamilton's quaternions (embedded in quaternionic 2x2 matrices) and the
//! order `Z<i, j>` of the rational quaternion algebra `(2, 3)` (embedded in
//! real 2x2 matrices). Both have reduced norms in `Z`, hence minimum
//! determinant one.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::quaternionic_defect;
use crate::error::{Error, Result};
use crate::linalg::{determinant, ComplexMatrix};

/// Default upper bound on the number of enumerated lattice points.
pub const DEFAULT_POINT_CAP: u64 = 1_000_000;
/// Relative slack on the squared radius when deciding shell membership.
const SHELL_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Real,
    Quaternionic,
    Complex,
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::Real => "real",
            Flavor::Quaternionic => "quaternionic",
            Flavor::Complex => "complex",
        })
    }
}

/// Exact structural predicate for square codewords of the given flavor.
pub fn structure_check(x: &ComplexMatrix, flavor: Flavor) -> bool {
    if !x.is_square() {
        return false;
    }
    match flavor {
        Flavor::Real => x.is_real(),
        Flavor::Quaternionic => quaternionic_defect(x) == Some(0.0),
        Flavor::Complex => true,
    }
}

/// `Z B_1 + ... + Z B_k` inside `M_n(C)`.
#[derive(Clone)]
pub struct MatrixLattice {
    ambient_n: usize,
    basis: Vec<ComplexMatrix>,
    flavor: Flavor,
    /// Row-major k x k Gram matrix of `Re tr(B_i B_j†)`.
    gram: Vec<f64>,
    /// Upper-triangular Cholesky factor `R` with `gram = Rᵀ R`, row-major.
    chol: Vec<f64>,
}

impl fmt::Debug for MatrixLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MatrixLattice")
            .field("ambient_n", &self.ambient_n)
            .field("flavor", &self.flavor)
            .field("k", &self.basis.len())
            .finish()
    }
}

impl MatrixLattice {
    pub fn new(ambient_n: usize, basis: Vec<ComplexMatrix>, flavor: Flavor) -> Result<Self> {
        let k = basis.len();
        if ambient_n == 0 || k == 0 {
            return Err(Error::InvalidParameter("empty lattice".into()));
        }
        for (i, b) in basis.iter().enumerate() {
            if b.rows() != ambient_n || b.cols() != ambient_n {
                return Err(Error::Dimension(format!(
                    "generator {i} is {}x{}, expected {ambient_n}x{ambient_n}",
                    b.rows(),
                    b.cols()
                )));
            }
            if !structure_check(b, flavor) {
                return Err(Error::Structure(format!("generator {i} is not {flavor}")));
            }
        }
        let max_k = match flavor {
            Flavor::Real | Flavor::Quaternionic => ambient_n * ambient_n,
            Flavor::Complex => 2 * ambient_n * ambient_n,
        };
        if k > max_k {
            return Err(Error::InvalidParameter(format!(
                "{k} generators exceed the {flavor} dimension {max_k}"
            )));
        }
        let mut gram = vec![0.0; k * k];
        for i in 0..k {
            for j in 0..k {
                gram[i * k + j] = basis[i].real_inner(&basis[j]);
            }
        }
        let chol = cholesky_upper(&gram, k).ok_or(Error::NotPositiveDefinite)?;
        Ok(MatrixLattice {
            ambient_n,
            basis,
            flavor,
            gram,
            chol,
        })
    }

    pub fn ambient_n(&self) -> usize {
        self.ambient_n
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[ComplexMatrix] {
        &self.basis
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    /// Gram matrix entry `(i, j)`.
    pub fn gram(&self, i: usize, j: usize) -> f64 {
        self.gram[i * self.dimension() + j]
    }

    pub fn point(&self, coords: &[i64]) -> ComplexMatrix {
        assert_eq!(coords.len(), self.dimension());
        let n = self.ambient_n;
        let mut out = ComplexMatrix::zeros(n, n);
        for (c, b) in coords.iter().zip(&self.basis) {
            if *c == 0 {
                continue;
            }
            let c = *c as f64;
            for i in 0..n {
                for j in 0..n {
                    out[(i, j)] += b[(i, j)] * c;
                }
            }
        }
        out
    }

    /// Real coordinates of `x` in the basis (least squares through the Gram
    /// matrix; exact when `x` lies in the real span).
    pub fn coordinates(&self, x: &ComplexMatrix) -> Result<Vec<f64>> {
        if x.rows() != self.ambient_n || x.cols() != self.ambient_n {
            return Err(Error::Dimension("point outside the ambient space".into()));
        }
        let k = self.dimension();
        let rhs: Vec<f64> = self.basis.iter().map(|b| b.real_inner(x)).collect();
        // Rᵀ y = rhs, then R c = y.
        let mut y = vec![0.0; k];
        for i in 0..k {
            let s: f64 = (0..i).map(|j| self.chol[j * k + i] * y[j]).sum();
            y[i] = (rhs[i] - s) / self.chol[i * k + i];
        }
        let mut c = vec![0.0; k];
        for i in (0..k).rev() {
            let s: f64 = (i + 1..k).map(|j| self.chol[i * k + j] * c[j]).sum();
            c[i] = (y[i] - s) / self.chol[i * k + i];
        }
        Ok(c)
    }

    /// Rough count of lattice points in the radius-`m` ball (volume ratio).
    pub fn estimate_shell_count(&self, m: f64) -> f64 {
        let k = self.dimension() as f64;
        let det_sqrt: f64 = (0..self.dimension()).map(|i| self.chol[i * self.dimension() + i]).product();
        let ball = std::f64::consts::PI.powf(k / 2.0) / gamma_half_integer(k / 2.0 + 1.0);
        ball * m.powf(k) / det_sqrt
    }
}

/// Upper Cholesky factor of a symmetric positive definite matrix.
fn cholesky_upper(a: &[f64], k: usize) -> Option<Vec<f64>> {
    let mut r = vec![0.0; k * k];
    for i in 0..k {
        let d = a[i * k + i] - (0..i).map(|p| r[p * k + i] * r[p * k + i]).sum::<f64>();
        if !(d > 1e-14 * a[i * k + i].abs().max(1.0)) {
            return None;
        }
        let d = d.sqrt();
        r[i * k + i] = d;
        for j in i + 1..k {
            let s = a[i * k + j] - (0..i).map(|p| r[p * k + i] * r[p * k + j]).sum::<f64>();
            r[i * k + j] = s / d;
        }
    }
    Some(r)
}

/// Γ(x) for positive integer or half-integer x.
fn gamma_half_integer(x: f64) -> f64 {
    let mut acc = if x.fract() == 0.0 { 1.0 } else { std::f64::consts::PI.sqrt() };
    let mut t = if x.fract() == 0.0 { 1.0 } else { 0.5 };
    while t < x - 0.25 {
        acc *= t;
        t += 1.0;
    }
    acc
}

/// A lattice point together with its integer coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ShellPoint {
    pub coords: Vec<i64>,
    pub matrix: ComplexMatrix,
}

impl ShellPoint {
    pub fn norm_sqr(&self) -> f64 {
        self.matrix.frobenius_norm_sqr()
    }
}

/// All lattice points of Frobenius norm at most `m`, zero included.
pub fn enumerate_shell(lattice: &MatrixLattice, m: f64) -> Result<Vec<ComplexMatrix>> {
    Ok(enumerate_shell_points(lattice, m, DEFAULT_POINT_CAP)?
        .into_iter()
        .map(|p| p.matrix)
        .collect())
}

/// Fincke-Pohst enumeration of `{c ∈ Z^k : cᵀ G c ≤ m²}`.
///
/// Works down from the last coordinate; at depth `i` the admissible range
/// of `c_i` is the interval around the projected center allowed by the
/// remaining squared-norm budget. Fails once more than `cap` points are
/// found.
pub fn enumerate_shell_points(lattice: &MatrixLattice, m: f64, cap: u64) -> Result<Vec<ShellPoint>> {
    if !(m >= 0.0) || !m.is_finite() {
        return Err(Error::InvalidParameter(format!("shell radius must be >= 0, got {m}")));
    }
    let k = lattice.dimension();
    let r = &lattice.chol;
    let limit = m * m * (1.0 + SHELL_SLACK);
    // Loose budget for the search; membership is decided on the matrix.
    let budget = m * m * (1.0 + 1e-9) + 1e-12;

    let mut out = Vec::new();
    let mut coords = vec![0i64; k];
    // partial[i] = squared norm contributed by coordinates i..k
    let mut partial = vec![0.0; k + 1];
    let mut upper = vec![0i64; k];

    // Interval for coordinate i given coords[i+1..].
    let bounds = |i: usize, coords: &[i64], partial: &[f64]| -> Option<(i64, i64)> {
        let rii = r[i * k + i];
        let shift: f64 = (i + 1..k).map(|j| r[i * k + j] * coords[j] as f64).sum::<f64>() / rii;
        let rest = budget - partial[i + 1];
        if rest < 0.0 {
            return None;
        }
        let half = rest.sqrt() / rii;
        let lo = (-shift - half).ceil() as i64;
        let hi = (-shift + half).floor() as i64;
        (lo <= hi).then_some((lo, hi))
    };
    let contribution = |i: usize, coords: &[i64]| -> f64 {
        let v: f64 = (i..k).map(|j| r[i * k + j] * coords[j] as f64).sum();
        v * v
    };

    let mut i = k - 1;
    match bounds(i, &coords, &partial) {
        Some((lo, hi)) => {
            coords[i] = lo;
            upper[i] = hi;
        }
        None => return Ok(out),
    }
    loop {
        if coords[i] > upper[i] {
            if i == k - 1 {
                break;
            }
            i += 1;
            coords[i] += 1;
            continue;
        }
        partial[i] = partial[i + 1] + contribution(i, &coords);
        if i == 0 {
            let matrix = lattice.point(&coords);
            if matrix.frobenius_norm_sqr() <= limit {
                if out.len() as u64 >= cap {
                    return Err(Error::ResourceCap {
                        what: "shell enumeration",
                        estimate: lattice.estimate_shell_count(m).ceil() as u64,
                        cap,
                    });
                }
                out.push(ShellPoint {
                    coords: coords.clone(),
                    matrix,
                });
            }
            coords[0] += 1;
            continue;
        }
        if partial[i] > budget {
            coords[i] += 1;
            continue;
        }
        i -= 1;
        match bounds(i, &coords, &partial) {
            Some((lo, hi)) => {
                coords[i] = lo;
                upper[i] = hi;
            }
            None => {
                i += 1;
                coords[i] += 1;
            }
        }
    }
    Ok(out)
}

/// Smallest `|det X|` over the nonzero points of `L(m)`.
pub fn min_det(lattice: &MatrixLattice, m: f64) -> Result<f64> {
    let pts = enumerate_shell_points(lattice, m, DEFAULT_POINT_CAP)?;
    let mut best: Option<f64> = None;
    for p in pts.iter().filter(|p| p.coords.iter().any(|&c| c != 0)) {
        let d = determinant(&p.matrix)?.norm();
        best = Some(best.map_or(d, |b: f64| b.min(d)));
    }
    best.ok_or(Error::EmptyShell)
}

fn cplx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Lipschitz quaternions `Z + Zi + Zj + Zk` as 2x2 quaternionic matrices.
pub fn build_hamilton_order() -> MatrixLattice {
    let mk = |v: [Complex64; 4]| ComplexMatrix::from_vec(2, 2, v.to_vec()).unwrap();
    let o = cplx(0.0, 0.0);
    let basis = vec![
        mk([cplx(1.0, 0.0), o, o, cplx(1.0, 0.0)]),
        mk([cplx(0.0, 1.0), o, o, cplx(0.0, -1.0)]),
        mk([o, cplx(-1.0, 0.0), cplx(1.0, 0.0), o]),
        mk([o, cplx(0.0, -1.0), cplx(0.0, -1.0), o]),
    ];
    MatrixLattice::new(2, basis, Flavor::Quaternionic).expect("Lipschitz basis is valid")
}

/// The order `Z<i, j>` of the algebra with `i² = 2`, `j² = 3`, embedded by
/// `x + yi + zj + wk ↦ [[x + y√2, z + w√2], [3(z − w√2), x − y√2]]`.
/// The determinant of the image is `x² − 2y² − 3z² + 6w²`.
pub fn build_split_order() -> MatrixLattice {
    let s = std::f64::consts::SQRT_2;
    let mk = |v: [f64; 4]| ComplexMatrix::from_real(2, 2, &v).unwrap();
    let basis = vec![
        mk([1.0, 0.0, 0.0, 1.0]),
        mk([s, 0.0, 0.0, -s]),
        mk([0.0, 1.0, 3.0, 0.0]),
        mk([0.0, s, -3.0 * s, 0.0]),
    ];
    MatrixLattice::new(2, basis, Flavor::Real).expect("split-order basis is valid")
}

/// Reduced norm of `x + yi + zj + wk` in the `(2, 3)` algebra.
pub fn split_order_norm(x: i64, y: i64, z: i64, w: i64) -> i64 {
    x * x - 2 * y * y - 3 * z * z + 6 * w * w
}

/// Looks up a built-in lattice by name.
pub fn builtin(name: &str) -> Option<MatrixLattice> {
    match name {
        "hamilton" | "lipschitz" => Some(build_hamilton_order()),
        "split" => Some(build_split_order()),
        _ => None,
    }
}

/// Finite constellation of scaled codewords.
#[derive(Debug, Clone)]
pub struct Codebook {
    points: Vec<ComplexMatrix>,
    coords: Vec<Vec<i64>>,
    radius_m: f64,
    rho: f64,
    r: f64,
    source: Option<Arc<MatrixLattice>>,
}

impl Codebook {
    /// Ad hoc codebook without a source lattice. Points must be distinct
    /// and have norm at most one.
    pub fn from_points(points: Vec<ComplexMatrix>) -> Result<Self> {
        for (i, p) in points.iter().enumerate() {
            if p.frobenius_norm() > 1.0 + 1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "codeword {i} has norm {} > 1",
                    p.frobenius_norm()
                )));
            }
            if points[..i].iter().any(|q| q == p) {
                return Err(Error::InvalidParameter(format!("codeword {i} is repeated")));
            }
        }
        Ok(Codebook {
            points,
            coords: Vec::new(),
            radius_m: 1.0,
            rho: 1.0,
            r: 0.0,
            source: None,
        })
    }

    fn from_shell(
        lattice: Arc<MatrixLattice>,
        shell: Vec<ShellPoint>,
        radius_m: f64,
        rho: f64,
        r: f64,
    ) -> Self {
        let inv = if radius_m > 0.0 { 1.0 / radius_m } else { 1.0 };
        let (coords, points) = shell
            .into_iter()
            .map(|p| (p.coords, p.matrix.scale(inv)))
            .unzip();
        Codebook {
            points,
            coords,
            radius_m,
            rho,
            r,
            source: Some(lattice),
        }
    }

    pub fn points(&self) -> &[ComplexMatrix] {
        &self.points
    }

    /// Integer coordinates of each codeword; empty for ad hoc codebooks.
    pub fn coords(&self) -> &[Vec<i64>] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn radius_m(&self) -> f64 {
        self.radius_m
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn source(&self) -> Option<&Arc<MatrixLattice>> {
        self.source.as_ref()
    }

    /// Codewords before scaling, i.e. the lattice points `M X̄`.
    pub fn unscaled_points(&self) -> Vec<ComplexMatrix> {
        match &self.source {
            Some(l) if !self.coords.is_empty() => self.coords.iter().map(|c| l.point(c)).collect(),
            _ => self.points.iter().map(|p| p.scale(self.radius_m)).collect(),
        }
    }

    /// Bits per channel use, `log2 |C| / n`.
    pub fn rate_bits(&self) -> f64 {
        match self.points.first() {
            Some(p) if !self.points.is_empty() => (self.points.len() as f64).log2() / p.rows() as f64,
            _ => 0.0,
        }
    }
}

/// `C(rho) = M⁻¹ L(M)` with `M = rho^{r n / k}`.
pub fn shape_codebook(lattice: &Arc<MatrixLattice>, rho: f64, r: f64) -> Result<Codebook> {
    shape_codebook_capped(lattice, rho, r, DEFAULT_POINT_CAP)
}

pub fn shape_codebook_capped(lattice: &Arc<MatrixLattice>, rho: f64, r: f64, cap: u64) -> Result<Codebook> {
    if !(rho >= 1.0) || !rho.is_finite() {
        return Err(Error::InvalidParameter(format!("shaping needs rho >= 1, got {rho}")));
    }
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::InvalidParameter(format!("shaping needs r >= 0, got {r}")));
    }
    let n = lattice.ambient_n() as f64;
    let k = lattice.dimension() as f64;
    let radius = rho.powf(r * n / k);
    let estimate = lattice.estimate_shell_count(radius);
    if estimate > cap as f64 {
        return Err(Error::ResourceCap {
            what: "codebook shaping",
            estimate: estimate.ceil() as u64,
            cap,
        });
    }
    let shell = enumerate_shell_points(lattice, radius, cap)?;
    Ok(Codebook::from_shell(lattice.clone(), shell, radius, rho, r))
}

/// Fixed-size codebook for zero multiplexing gain.
///
/// Takes the smallest ball holding at least `size` nonzero lattice points
/// and keeps the `size` points of largest norm (ties broken by coordinates),
/// scaled into the unit ball. The result does not depend on the SNR.
pub fn fixed_codebook(lattice: &Arc<MatrixLattice>, size: usize) -> Result<Codebook> {
    if size < 2 {
        return Err(Error::InvalidParameter("fixed codebook needs at least 2 points".into()));
    }
    let mut radius = 1.0;
    let mut shell = loop {
        let pts = enumerate_shell_points(lattice, radius, DEFAULT_POINT_CAP)?;
        let nonzero: Vec<ShellPoint> = pts
            .into_iter()
            .filter(|p| p.coords.iter().any(|&c| c != 0))
            .collect();
        if nonzero.len() >= size {
            break nonzero;
        }
        radius *= 1.25;
    };
    // Shrink the radius to the largest norm actually present.
    shell.sort_by(|a, b| {
        b.norm_sqr()
            .total_cmp(&a.norm_sqr())
            .then_with(|| a.coords.cmp(&b.coords))
    });
    // Largest-norm points of the smallest sufficient ball: drop points beyond
    // the size-th smallest norm first.
    let mut by_norm = shell.clone();
    by_norm.sort_by(|a, b| a.norm_sqr().total_cmp(&b.norm_sqr()).then_with(|| a.coords.cmp(&b.coords)));
    let cutoff = by_norm[size - 1].norm_sqr() * (1.0 + SHELL_SLACK);
    shell.retain(|p| p.norm_sqr() <= cutoff);
    shell.truncate(size);
    shell.sort_by(|a, b| a.coords.cmp(&b.coords));
    let radius_m = shell.iter().map(|p| p.norm_sqr()).fold(0.0, f64::max).sqrt();
    Ok(Codebook::from_shell(lattice.clone(), shell, radius_m, 1.0, 0.0))
}

/// Result of enumerating a shell and checking the determinant condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatticeAudit {
    pub radius: f64,
    pub points: usize,
    pub min_det: f64,
    /// Largest distance of a nonzero `|det X|` from the nearest integer.
    pub max_integrality_error: f64,
    pub nvd: bool,
}

/// Enumerates `L(radius)` and checks that every nonzero determinant is a
/// positive integer up to `1e-9`.
pub fn audit(lattice: &MatrixLattice, radius: f64) -> Result<LatticeAudit> {
    let pts = enumerate_shell_points(lattice, radius, DEFAULT_POINT_CAP)?;
    let mut min = f64::INFINITY;
    let mut worst: f64 = 0.0;
    for p in pts.iter().filter(|p| p.coords.iter().any(|&c| c != 0)) {
        let d = determinant(&p.matrix)?.norm();
        min = min.min(d);
        worst = worst.max((d - d.round()).abs());
    }
    if !min.is_finite() {
        return Err(Error::EmptyShell);
    }
    Ok(LatticeAudit {
        radius,
        points: pts.len(),
        min_det: min,
        max_integrality_error: worst,
        nvd: worst <= 1e-9 && min >= 1.0 - 1e-9,
    })
}

/// On-disk description of a lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeFile {
    pub ambient_n: usize,
    pub flavor: Flavor,
    /// One entry per generator: row-major `[re, im]` pairs.
    pub basis: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodebookFile {
    #[serde(flatten)]
    pub lattice: LatticeFile,
    pub radius_m: f64,
    pub rho: f64,
    pub r: f64,
}

impl From<&MatrixLattice> for LatticeFile {
    fn from(l: &MatrixLattice) -> Self {
        LatticeFile {
            ambient_n: l.ambient_n,
            flavor: l.flavor,
            basis: l
                .basis
                .iter()
                .map(|b| b.entries().iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }
}

impl TryFrom<LatticeFile> for MatrixLattice {
    type Error = Error;

    fn try_from(f: LatticeFile) -> Result<Self> {
        let n = f.ambient_n;
        let basis = f
            .basis
            .into_iter()
            .map(|g| ComplexMatrix::from_vec(n, n, g.into_iter().map(|[re, im]| cplx(re, im)).collect()))
            .collect::<Result<Vec<_>>>()?;
        MatrixLattice::new(n, basis, f.flavor)
    }
}

pub fn lattice_to_json(l: &MatrixLattice) -> String {
    serde_json::to_string_pretty(&LatticeFile::from(l)).expect("lattice serializes")
}

pub fn lattice_from_json(s: &str) -> Result<MatrixLattice> {
    let f: LatticeFile = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    MatrixLattice::try_from(f)
}

pub fn codebook_to_json(cb: &Codebook) -> Result<String> {
    let source = cb
        .source()
        .ok_or_else(|| Error::InvalidParameter("codebook has no source lattice".into()))?;
    let file = CodebookFile {
        lattice: LatticeFile::from(source.as_ref()),
        radius_m: cb.radius_m,
        rho: cb.rho,
        r: cb.r,
    };
    Ok(serde_json::to_string_pretty(&file).expect("codebook serializes"))
}
