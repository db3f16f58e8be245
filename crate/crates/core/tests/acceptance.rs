//! Acceptance suite. Each test prints one PASS/FAIL line (bypassing the
//! harness capture) and then asserts.

use std::io::Write;
use std::sync::Arc;
use std::time::Instant;

use dmtlab::channel::{paired_eigenvalues, quaternion_lift, quaternionic_defect, realify};
use dmtlab::dmt::{
    classical_dmt, curves_csv, d1_curve, d2_curve, exponent_quaternion, exponent_real, laplace_exponent_estimate,
    lemma2_bruteforce, lemma2_closed_form, a0_membership, Lemma2Problem,
};
use dmtlab::lattice::{audit, build_hamilton_order, build_split_order, fixed_codebook, shape_codebook, split_order_norm};
use dmtlab::linalg::hermitian_eigenvalues;
use dmtlab::rng::{complex_gaussian_matrix, real_gaussian_matrix, substream};
use dmtlab::sim::{
    chi2_tail, check_mismatched_bound, check_nvd_product_bound, estimate_error_prob, estimate_outage, ErrorOptions,
    NvdConstant,
};
use dmtlab::{Mode, SystemConfig};
use rand::Rng;
use rand_distr::StandardNormal;

fn report(id: u32, name: &str, pass: bool, detail: String, started: Instant) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let line = format!(
        "acceptance {id}: {verdict} {name} ({detail}; {:.1}s)\n",
        started.elapsed().as_secs_f64()
    );
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12
}

#[test]
fn criterion_1_tradeoff_curves() {
    let t = Instant::now();
    let want_d1 = [(0.0, 8.0), (0.5, 4.5), (1.0, 2.0), (1.5, 0.5), (2.0, 0.0)];
    let want_d2 = [(0.0, 8.0), (1.0, 2.0), (2.0, 0.0)];
    let want_star = [(0.0, 8.0), (1.0, 3.0), (2.0, 0.0)];
    let same = |got: &[(f64, f64)], want: &[(f64, f64)]| {
        got.len() == want.len() && got.iter().zip(want).all(|(g, w)| close(g.0, w.0) && close(g.1, w.1))
    };
    let mut pass = same(d1_curve(4, 2).unwrap().anchors(), &want_d1)
        && same(d2_curve(4, 2).unwrap().anchors(), &want_d2)
        && same(classical_dmt(4, 2).unwrap().anchors(), &want_star);
    let csv = curves_csv(4, 2, 0.01).unwrap();
    let mut rows = 0;
    for line in csv.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        rows += 1;
        pass &= v[2] <= v[3] + 1e-12 && v[3] <= v[1] + 1e-12;
        for (r, d) in want_d1 {
            if close(v[0], r) {
                pass &= close(v[2], d);
            }
        }
    }
    report(1, "tradeoff curves for n=4 m=2", pass, format!("{rows} sampled rows ordered"), t);
    assert!(pass);
}

#[test]
fn criterion_2_lemma2_oracle() {
    let t = Instant::now();
    let step = 0.02;
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    let mut skipped = Vec::new();
    for q in 1..=6usize {
        for l in 1..=4usize {
            if q < l {
                skipped.push(format!("({q},{l})"));
                continue;
            }
            for i in 0..=(4 * l) {
                let s = i as f64 * 0.25;
                let p = Lemma2Problem::new(q as f64, l, s).unwrap();
                let (v, alpha) = lemma2_closed_form(&p);
                let b = lemma2_bruteforce(&p, step).unwrap();
                let tol = (l * (q + l)) as f64 * step;
                worst = worst.max((v - b).abs() / tol);
                checked += 1;
                if (v - b).abs() > tol || !a0_membership(&alpha, s) || (p.objective(&alpha) - v).abs() > 1e-12 {
                    failures.push(format!("q={q} l={l} s={s}"));
                }
            }
        }
    }
    let pass = failures.is_empty();
    report(
        2,
        "closed-form exponent minimum vs grid oracle",
        pass,
        format!(
            "{checked} cases, worst gap {:.2} of tolerance, q<l pairs {} outside the q >= l domain{}",
            worst,
            skipped.join(" "),
            if pass { String::new() } else { format!(", failing {}", failures.join("; ")) }
        ),
        t,
    );
    assert!(pass);
}

#[test]
fn criterion_3_exponent_curve_identity() {
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for n in (2..=6).step_by(2) {
        for m in 1..=4 {
            let c1 = d1_curve(n, m).unwrap();
            let c2 = d2_curve(n, m).unwrap();
            for i in 0..=200 {
                let r = c1.r_max() * i as f64 / 200.0;
                worst = worst.max((exponent_real(n, m, r).unwrap() - c1.eval(r).unwrap()).abs());
                let r = c2.r_max() * i as f64 / 200.0;
                worst = worst.max((exponent_quaternion(n, m, r).unwrap() - c2.eval(r).unwrap()).abs());
                count += 2;
            }
        }
    }
    let pass = worst <= 1e-12;
    report(3, "exponents equal curves", pass, format!("{count} evaluations, max error {worst:e}"), t);
    assert!(pass);
}

#[test]
fn criterion_4_nvd_audits() {
    let t = Instant::now();
    let h = audit(&build_hamilton_order(), 4.0).unwrap();
    let s = audit(&build_split_order(), 4.0).unwrap();
    let mut root = None;
    'outer: for x in -20i64..=20 {
        for y in -20i64..=20 {
            for z in -20i64..=20 {
                for w in -20i64..=20 {
                    if (x, y, z, w) != (0, 0, 0, 0) && split_order_norm(x, y, z, w) == 0 {
                        root = Some((x, y, z, w));
                        break 'outer;
                    }
                }
            }
        }
    }
    let ok = |a: &dmtlab::lattice::LatticeAudit| a.nvd && (a.min_det - 1.0).abs() <= 1e-9 && a.max_integrality_error <= 1e-9;
    let pass = ok(&h) && ok(&s) && root.is_none();
    report(
        4,
        "NVD audits at radius 4",
        pass,
        format!(
            "hamilton {} points min_det {}, split {} points min_det {}, norm-form root {:?}",
            h.points, h.min_det, s.points, s.min_det, root
        ),
        t,
    );
    assert!(pass);
}

const OUTAGE_GRID: [f64; 5] = [10.0, 15.0, 20.0, 25.0, 30.0];

#[test]
fn criterion_5_outage_slope_real() {
    let t = Instant::now();
    let cfg = SystemConfig::new(2, 1, 1.0, 0.5).unwrap();
    let res = estimate_outage(Mode::Real, &cfg, &OUTAGE_GRID, 1_000_000, 0x5eed_0005).unwrap();
    let slope = res.estimate.slope.unwrap_or(f64::NAN);
    let pass = (slope - 0.5).abs() <= 0.2;
    report(
        5,
        "real outage slope n=2 m=1 r=0.5",
        pass,
        format!("slope {slope:.4} vs 0.5 +- 0.2, probs {:?}", res.estimate.probs),
        t,
    );
    assert!(pass);
}

#[test]
fn criterion_6_outage_slope_quaternion() {
    let t = Instant::now();
    let cfg = SystemConfig::new(2, 1, 1.0, 0.5).unwrap();
    let res = estimate_outage(Mode::Quaternion, &cfg, &OUTAGE_GRID, 1_000_000, 0x5eed_0006).unwrap();
    let slope = res.estimate.slope.unwrap_or(f64::NAN);
    let pass = (slope - 1.0).abs() <= 0.25;
    report(
        6,
        "quaternion outage slope n=2 m=1 r=0.5",
        pass,
        format!("slope {slope:.4} vs 1.0 +- 0.25, probs {:?}", res.estimate.probs),
        t,
    );
    assert!(pass);
}

#[test]
fn criterion_7_error_slope_zero_multiplexing() {
    let t = Instant::now();
    let lattice = Arc::new(build_hamilton_order());
    let cb = fixed_codebook(&lattice, 16).unwrap();
    let cfg = SystemConfig::new(2, 1, 1.0, 0.0).unwrap();
    let grid = [14.0, 17.0, 20.0, 23.0, 26.0];
    let res = estimate_error_prob(
        Mode::Quaternion,
        &lattice,
        &cfg,
        &grid,
        200_000,
        0x5eed_0007,
        &ErrorOptions::default(),
    )
    .unwrap();
    let slope = res.estimate.slope.unwrap_or(f64::NAN);
    let pass = cb.len() == 16 && (slope - 2.0).abs() <= 0.4;
    report(
        7,
        "ML error slope, 16 Lipschitz codewords, n=2 m=1",
        pass,
        format!("slope {slope:.4} vs 2 +- 0.4, events {:?}", res.estimate.events),
        t,
    );
    assert!(pass);
}

#[test]
fn criterion_8_structural_properties() {
    let t = Instant::now();
    let mut rng = substream(0x5eed_0008, 0);
    let mut notes = Vec::new();

    let mut realify_ok = true;
    for _ in 0..1000 {
        let h = complex_gaussian_matrix(&mut rng, 3, 2);
        let x = real_gaussian_matrix(&mut rng, 2, 2);
        realify_ok &= realify(&(&h * &x)).max_abs_diff(&(&realify(&h) * &x)) == 0.0;
    }
    notes.push(format!("realify {realify_ok}"));

    let mut lift_ok = true;
    for _ in 0..1000 {
        let a = quaternion_lift(&complex_gaussian_matrix(&mut rng, 2, 4)).unwrap();
        let b = quaternion_lift(&complex_gaussian_matrix(&mut rng, 2, 4)).unwrap();
        let ab = &a.block(0, 0, 4, 4) * &b.block(0, 0, 4, 4);
        let scale = ab.frobenius_norm().max(1.0);
        lift_ok &= quaternionic_defect(&ab).is_some_and(|d| d <= 1e-12 * scale);
        let eig = hermitian_eigenvalues(&a.gram()).unwrap();
        lift_ok &= paired_eigenvalues(&eig).is_ok();
    }
    notes.push(format!("lift {lift_ok}"));

    let mut mismatch_ok = true;
    for _ in 0..10_000 {
        let h = real_gaussian_matrix(&mut rng, 2, 3);
        let dx = real_gaussian_matrix(&mut rng, 3, 3);
        mismatch_ok &= check_mismatched_bound(&h, &dx).unwrap();
    }
    notes.push(format!("mismatched {mismatch_ok}"));

    let mut nvd_ok = true;
    for l in [build_hamilton_order(), build_split_order()] {
        let cb = shape_codebook(&Arc::new(l), 100.0, 0.5).unwrap();
        nvd_ok &= check_nvd_product_bound(&cb, NvdConstant::Rigorous).unwrap().pass;
    }
    notes.push(format!("nvd {nvd_ok}"));

    let samples = 400_000;
    let mut chi_ok = true;
    let mut worst_z: f64 = 0.0;
    for k in [1usize, 2, 4] {
        let draws: Vec<f64> = (0..samples)
            .map(|_| (0..2 * k).map(|_| rng.sample::<f64, _>(StandardNormal).powi(2)).sum())
            .collect();
        for x in [0.5, 1.0, 2.0] {
            let p = chi2_tail(x, k).unwrap();
            let hits = draws.iter().filter(|&&v| v > 2.0 * x).count() as f64 / samples as f64;
            let z = (hits - p).abs() / (p * (1.0 - p) / samples as f64).sqrt();
            worst_z = worst_z.max(z);
            chi_ok &= z <= 3.0;
        }
    }
    notes.push(format!("chi2 worst z {worst_z:.2}"));

    let pass = realify_ok && lift_ok && mismatch_ok && nvd_ok && chi_ok;
    report(8, "structural property suites", pass, notes.join(", "), t);
    assert!(pass);
}

#[test]
fn criterion_9_laplace_estimator() {
    let t = Instant::now();
    let grid = [1e4, 1e6];
    let a = laplace_exponent_estimate(&[1.0], 0.0, &grid).unwrap();
    let b = laplace_exponent_estimate(&[1.0], 1.0, &grid).unwrap();
    let p = Lemma2Problem::new(2.0, 2, 0.5).unwrap();
    let target = lemma2_closed_form(&p).0;
    let c = laplace_exponent_estimate(&p.coefficients(), 0.5, &grid).unwrap();
    let pass = (a - 1.0).abs() <= 0.05 && b.abs() <= 0.05 && (c - target).abs() <= 0.1;
    report(
        9,
        "Laplace exponent estimator",
        pass,
        format!("{a:.4} vs 1, {b:.4} vs 0, {c:.4} vs {target}"),
        t,
    );
    assert!(pass);
}
