//! Diversity-multiplexing tradeoff curves and the exponent minimization
//! behind them.
//!
//! The outage exponent of both code families reduces to minimizing the
//! linear form `f(α) = Σ (q + l + 1 − 2i) α_i` over the polyhedron
//!
//! ```text
//! A₀(s) = { 0 ≤ α₁ ≤ … ≤ α_l : Σ_{i ≤ j} (1 − α_i) ≤ s for all j }
//! ```
//!
//! whose minimum `d̄(s)` is piecewise linear in `s` with breakpoints at the
//! integers.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Slack for membership tests and domain checks.
pub const MEMBERSHIP_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinearCurve {
    anchors: Vec<(f64, f64)>,
}

impl PiecewiseLinearCurve {
    pub fn new(anchors: Vec<(f64, f64)>) -> Result<Self> {
        if anchors.len() < 2 {
            return Err(Error::InvalidParameter("curve needs at least 2 anchors".into()));
        }
        for w in anchors.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::InvalidParameter("anchor abscissae must increase".into()));
            }
            if w[1].1 > w[0].1 {
                return Err(Error::InvalidParameter("anchor values must not increase".into()));
            }
        }
        if anchors.iter().any(|a| !(a.1 >= 0.0) || !a.0.is_finite()) {
            return Err(Error::InvalidParameter("anchor values must be finite and >= 0".into()));
        }
        if anchors.last().unwrap().1 != 0.0 {
            return Err(Error::InvalidParameter("last anchor must be zero".into()));
        }
        Ok(PiecewiseLinearCurve { anchors })
    }

    pub fn anchors(&self) -> &[(f64, f64)] {
        &self.anchors
    }

    pub fn r_min(&self) -> f64 {
        self.anchors[0].0
    }

    pub fn r_max(&self) -> f64 {
        self.anchors[self.anchors.len() - 1].0
    }

    pub fn eval(&self, r: f64) -> Result<f64> {
        let (lo, hi) = (self.r_min(), self.r_max());
        if !(r >= lo - MEMBERSHIP_SLACK && r <= hi + MEMBERSHIP_SLACK) {
            return Err(Error::OutOfRange(format!("r = {r} outside [{lo}, {hi}]")));
        }
        let r = r.clamp(lo, hi);
        let idx = self
            .anchors
            .partition_point(|a| a.0 <= r)
            .clamp(1, self.anchors.len() - 1);
        let (r0, d0) = self.anchors[idx - 1];
        let (r1, d1) = self.anchors[idx];
        if r == r0 {
            return Ok(d0);
        }
        Ok(d0 + (d1 - d0) * (r - r0) / (r1 - r0))
    }

    /// Like [`eval`](Self::eval) but zero to the right of the last anchor.
    pub fn eval_extended(&self, r: f64) -> Result<f64> {
        if r > self.r_max() {
            Ok(0.0)
        } else {
            self.eval(r)
        }
    }
}

fn check_dims(n: usize, m: usize) -> Result<()> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidParameter(format!("need n, m >= 1, got n={n} m={m}")));
    }
    Ok(())
}

/// `(m − r)(n − 2r)` clipped at zero.
fn split_value(n: usize, m: usize, r: f64) -> f64 {
    ((m as f64 - r) * (n as f64 - 2.0 * r)).max(0.0)
}

/// Optimal tradeoff of the `n x m` channel: anchors `(k, (m − k)(n − k))`.
pub fn classical_dmt(n: usize, m: usize) -> Result<PiecewiseLinearCurve> {
    check_dims(n, m)?;
    let anchors = (0..=n.min(m))
        .map(|k| (k as f64, ((m - k) * (n - k)) as f64))
        .collect();
    PiecewiseLinearCurve::new(anchors)
}

/// Real lattice codes: anchors at half-integer `r`.
pub fn d1_curve(n: usize, m: usize) -> Result<PiecewiseLinearCurve> {
    check_dims(n, m)?;
    let last = (2 * m).min(n);
    let anchors = (0..=last)
        .map(|j| {
            let r = j as f64 / 2.0;
            (r, split_value(n, m, r))
        })
        .collect();
    PiecewiseLinearCurve::new(anchors)
}

/// Quaternionic lattice codes: anchors at integer `r`. Needs even `n`.
pub fn d2_curve(n: usize, m: usize) -> Result<PiecewiseLinearCurve> {
    check_dims(n, m)?;
    if !n.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("quaternionic curve needs even n, got {n}")));
    }
    let anchors = (0..=m.min(n / 2))
        .map(|k| (k as f64, split_value(n, m, k as f64)))
        .collect();
    PiecewiseLinearCurve::new(anchors)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma2Problem {
    q: f64,
    l: usize,
    s: f64,
}

impl Lemma2Problem {
    /// Requires `l ≥ 1`, `q ≥ l` and `0 ≤ s ≤ l`.
    pub fn new(q: f64, l: usize, s: f64) -> Result<Self> {
        if l == 0 {
            return Err(Error::InvalidParameter("l must be >= 1".into()));
        }
        if !(q >= l as f64) {
            return Err(Error::InvalidParameter(format!("need q >= l, got q={q} l={l}")));
        }
        if !(s >= -MEMBERSHIP_SLACK && s <= l as f64 + MEMBERSHIP_SLACK) {
            return Err(Error::OutOfRange(format!("s = {s} outside [0, {l}]")));
        }
        Ok(Lemma2Problem {
            q,
            l,
            s: s.clamp(0.0, l as f64),
        })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    /// Coefficient of `α_i`, 1-based.
    pub fn coefficient(&self, i: usize) -> f64 {
        self.q + self.l as f64 + 1.0 - 2.0 * i as f64
    }

    pub fn coefficients(&self) -> Vec<f64> {
        (1..=self.l).map(|i| self.coefficient(i)).collect()
    }

    pub fn objective(&self, alpha: &[f64]) -> f64 {
        alpha
            .iter()
            .enumerate()
            .map(|(i, a)| self.coefficient(i + 1) * a)
            .sum()
    }
}

/// `d̄(s)` and the minimizing vertex of `A₀(s)`.
pub fn lemma2_closed_form(p: &Lemma2Problem) -> (f64, Vec<f64>) {
    let (q, l, s) = (p.q, p.l as f64, p.s);
    let fl = s.floor();
    let value = (-q - l + 2.0 * fl + 1.0) * s + q * l - fl * (fl + 1.0);
    let k = fl as usize + 1;
    let alpha = if k > p.l {
        vec![0.0; p.l]
    } else {
        (1..=p.l)
            .map(|i| match i.cmp(&k) {
                std::cmp::Ordering::Less => 0.0,
                std::cmp::Ordering::Equal => k as f64 - s,
                std::cmp::Ordering::Greater => 1.0,
            })
            .collect()
    };
    (value, alpha)
}

/// Grid minimum of `f` over `A₀(s) ∩ [0, 1]^l`.
pub fn lemma2_bruteforce(p: &Lemma2Problem, grid_step: f64) -> Result<f64> {
    if !(grid_step > 0.0) || !grid_step.is_finite() {
        return Err(Error::InvalidParameter(format!("grid step must be > 0, got {grid_step}")));
    }
    let steps = (1.0 / grid_step).ceil() as usize;
    let grid: Vec<f64> = (0..=steps).map(|j| (j as f64 * grid_step).min(1.0)).collect();
    let coeffs = p.coefficients();
    let best = (0..grid.len())
        .into_par_iter()
        .map(|first| {
            let mut alpha = vec![0.0; p.l];
            alpha[0] = grid[first];
            let slack = p.s - (1.0 - grid[first]);
            if slack < -MEMBERSHIP_SLACK {
                return f64::INFINITY;
            }
            scan(&grid, &coeffs, &mut alpha, 1, first, slack, coeffs[0] * grid[first])
        })
        .reduce(|| f64::INFINITY, f64::min);
    Ok(best)
}

// Depth-first over ascending grid tuples; `slack` is s minus the running
// prefix sum of (1 − α_i).
fn scan(grid: &[f64], coeffs: &[f64], alpha: &mut [f64], depth: usize, from: usize, slack: f64, acc: f64) -> f64 {
    if depth == alpha.len() {
        return acc;
    }
    let mut best = f64::INFINITY;
    for j in from..grid.len() {
        let s = slack - (1.0 - grid[j]);
        if s < -MEMBERSHIP_SLACK {
            continue;
        }
        alpha[depth] = grid[j];
        let v = scan(grid, coeffs, alpha, depth + 1, j, s, acc + coeffs[depth] * grid[j]);
        best = best.min(v);
    }
    best
}

/// Membership in `A₀(s)` through prefix sums of `1 − α_i`.
pub fn a0_membership(alpha: &[f64], s: f64) -> bool {
    if alpha.iter().any(|a| !(*a >= 0.0)) {
        return false;
    }
    if alpha.windows(2).any(|w| w[0] > w[1]) {
        return false;
    }
    let mut acc = 0.0;
    for a in alpha {
        acc += 1.0 - a;
        if acc > s + MEMBERSHIP_SLACK {
            return false;
        }
    }
    true
}

/// Same set, written with `Σ (1 − α_i)⁺ ≤ s`.
pub fn a0_membership_positive_part(alpha: &[f64], s: f64) -> bool {
    if alpha.iter().any(|a| !(*a >= 0.0)) || alpha.windows(2).any(|w| w[0] > w[1]) {
        return false;
    }
    alpha.iter().map(|a| (1.0 - a).max(0.0)).sum::<f64>() <= s + MEMBERSHIP_SLACK
}

/// `δ_k(α, s) = −(Σ_{i ≤ k} α_i + s − k) / k`, with 1-based `k`.
pub fn delta_k(alpha: &[f64], s: f64, k: usize) -> Result<f64> {
    if k == 0 || k > alpha.len() {
        return Err(Error::OutOfRange(format!("k = {k} outside 1..={}", alpha.len())));
    }
    let sum: f64 = alpha[..k].iter().sum();
    Ok(-(sum + s - k as f64) / k as f64)
}

/// Minimization parameters `(q, l)` for real codes on an `n x m` channel.
pub fn real_problem(n: usize, m: usize, r: f64) -> Result<Lemma2Problem> {
    check_dims(n, m)?;
    let l = (2 * m).min(n);
    let delta = n.abs_diff(2 * m);
    let s = 2.0 * r;
    if !(s >= -MEMBERSHIP_SLACK && s <= l as f64 + MEMBERSHIP_SLACK) {
        return Err(Error::OutOfRange(format!("r = {r} outside [0, {}]", l as f64 / 2.0)));
    }
    Lemma2Problem::new((delta + l) as f64, l, s)
}

/// Minimization parameters for quaternionic codes (`p = n / 2`).
pub fn quaternion_problem(n: usize, m: usize, r: f64) -> Result<Lemma2Problem> {
    check_dims(n, m)?;
    if !n.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("quaternionic exponent needs even n, got {n}")));
    }
    let p = n / 2;
    let l = m.min(p);
    let delta = p.abs_diff(m);
    if !(r >= -MEMBERSHIP_SLACK && r <= l as f64 + MEMBERSHIP_SLACK) {
        return Err(Error::OutOfRange(format!("r = {r} outside [0, {l}]")));
    }
    Lemma2Problem::new((delta + l) as f64, l, r)
}

/// `d̄(2r) / 2` for real codes.
pub fn exponent_real(n: usize, m: usize, r: f64) -> Result<f64> {
    let p = real_problem(n, m, r)?;
    Ok(lemma2_closed_form(&p).0 / 2.0)
}

/// `2 d̄(r)` for quaternionic codes.
pub fn exponent_quaternion(n: usize, m: usize, r: f64) -> Result<f64> {
    let p = quaternion_problem(n, m, r)?;
    Ok(2.0 * lemma2_closed_form(&p).0)
}

/// Quadrature step per dimension for [`laplace_exponent_estimate`].
pub const LAPLACE_STEP: f64 = 0.01;

/// Numerical Laplace-principle estimate of `inf_{A₀(s)} Σ N_i α_i`.
///
/// At each `ρ` the integral `I(ρ) = ∫ ρ^{−Σ N_i α_i} dα` over
/// `A₀(s) ∩ [0, 2]^l` is evaluated by the midpoint rule. The local slope
/// `−d ln I / d ln ρ` is the mean of `Σ N_i α_i` under the tilted weight
/// and behaves like `e + c / ln ρ`; the intercept `e` of a least-squares
/// fit in `1 / ln ρ` is returned.
pub fn laplace_exponent_estimate(coeffs: &[f64], s: f64, rho_grid: &[f64]) -> Result<f64> {
    Ok(laplace_profile(coeffs, s, rho_grid)?.exponent)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LaplaceProfile {
    pub rho: Vec<f64>,
    /// `−ln I(ρ) / ln ρ` at each grid point.
    pub naive: Vec<f64>,
    /// Tilted-mean local slope at each grid point.
    pub local_slope: Vec<f64>,
    pub exponent: f64,
}

pub fn laplace_profile(coeffs: &[f64], s: f64, rho_grid: &[f64]) -> Result<LaplaceProfile> {
    let l = coeffs.len();
    if l == 0 || l > 3 {
        return Err(Error::ResourceCap {
            what: "laplace quadrature dimension",
            estimate: l as u64,
            cap: 3,
        });
    }
    if rho_grid.len() < 2 {
        return Err(Error::InvalidParameter("need at least 2 SNR values".into()));
    }
    if rho_grid.iter().any(|r| !(*r >= 1e3) || !r.is_finite()) || rho_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("SNR grid must be increasing and >= 1e3".into()));
    }
    let values = quadrature_values(coeffs, s);
    if values.is_empty() {
        return Err(Error::InvalidParameter(format!("A0({s}) has no quadrature node in [0, 2]^{l}")));
    }
    let cell = LAPLACE_STEP.powi(l as i32);
    let fmin = values.iter().copied().fold(f64::INFINITY, f64::min);
    let mut naive = Vec::with_capacity(rho_grid.len());
    let mut local = Vec::with_capacity(rho_grid.len());
    for &rho in rho_grid {
        let lr = rho.ln();
        let (mut z, mut zf) = (0.0, 0.0);
        for &f in &values {
            let w = (-(f - fmin) * lr).exp();
            z += w;
            zf += w * f;
        }
        // ln I = −fmin ln ρ + ln(z · cell)
        naive.push(fmin - (z * cell).ln() / lr);
        local.push(zf / z);
    }
    // local = e + c · x with x = 1 / ln ρ
    let xs: Vec<f64> = rho_grid.iter().map(|r| 1.0 / r.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = local.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&local).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let exponent = my - (sxy / sxx) * mx;
    Ok(LaplaceProfile {
        rho: rho_grid.to_vec(),
        naive,
        local_slope: local,
        exponent,
    })
}

// Objective values at midpoint nodes of [0, 2]^l lying in A₀(s).
fn quadrature_values(coeffs: &[f64], s: f64) -> Vec<f64> {
    let cells = (2.0 / LAPLACE_STEP).round() as usize;
    let nodes: Vec<f64> = (0..cells).map(|j| (j as f64 + 0.5) * LAPLACE_STEP).collect();
    let mut out = Vec::new();
    let mut alpha = vec![0.0; coeffs.len()];
    collect_nodes(&nodes, coeffs, s, &mut alpha, 0, 0, 0.0, &mut out);
    out
}

#[allow(clippy::too_many_arguments)]
fn collect_nodes(nodes: &[f64], coeffs: &[f64], slack: f64, alpha: &mut [f64], depth: usize, from: usize, acc: f64, out: &mut Vec<f64>) {
    if depth == alpha.len() {
        out.push(acc);
        return;
    }
    for j in from..nodes.len() {
        let rest = slack - (1.0 - nodes[j]);
        if rest < -MEMBERSHIP_SLACK {
            continue;
        }
        alpha[depth] = nodes[j];
        collect_nodes(nodes, coeffs, rest, alpha, depth + 1, j, acc + coeffs[depth] * nodes[j], out);
    }
}

/// Default sampling step for curve export.
pub const DEFAULT_CURVE_STEP: f64 = 0.01;

/// Rounds away binary noise so exported numbers print cleanly.
pub fn tidy(x: f64) -> f64 {
    let t = (x * 1e12).round() / 1e12;
    if t == 0.0 {
        0.0
    } else {
        t
    }
}

/// CSV with header `r,d_star,d1,d2` on `[0, min(m, n)]`. Curves are zero
/// past their last anchor; `d2` is left empty for odd `n`.
pub fn curves_csv(n: usize, m: usize, step: f64) -> Result<String> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::InvalidParameter(format!("step must be > 0, got {step}")));
    }
    let star = classical_dmt(n, m)?;
    let d1 = d1_curve(n, m)?;
    let d2 = if n.is_multiple_of(2) { Some(d2_curve(n, m)?) } else { None };
    let r_max = star.r_max();
    let count = (r_max / step + 1e-9).floor() as usize;
    let mut out = String::from("r,d_star,d1,d2\n");
    let mut rows: Vec<f64> = (0..=count).map(|i| tidy(i as f64 * step)).collect();
    if rows.last().is_some_and(|r| (r - r_max).abs() > 1e-9) {
        rows.push(r_max);
    }
    for r in rows {
        let d2v = match &d2 {
            Some(c) => format!("{}", tidy(c.eval_extended(r)?)),
            None => String::new(),
        };
        out.push_str(&format!(
            "{},{},{},{}\n",
            r,
            tidy(star.eval(r)?),
            tidy(d1.eval_extended(r)?),
            d2v
        ));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnchorExport<'a> {
    pub curve: &'a str,
    pub anchors: Vec<[f64; 2]>,
}

pub fn anchors_json(name: &str, curve: &PiecewiseLinearCurve) -> String {
    let export = AnchorExport {
        curve: name,
        anchors: curve.anchors().iter().map(|&(r, d)| [r, d]).collect(),
    };
    serde_json::to_string(&export).expect("anchors serialize")
}
