use std::path::{Path, PathBuf};
use std::sync::Arc;

use dmtlab::dmt::{
    a0_membership, anchors_json, classical_dmt, curves_csv, d1_curve, d2_curve, lemma2_bruteforce, lemma2_closed_form,
    Lemma2Problem,
};
use dmtlab::lattice::{audit, builtin, lattice_from_json, MatrixLattice};
use dmtlab::rng::substream;
use dmtlab::sim::wishart::{log_p_alpha, log_p_prime, profile_shape, sample_wishart_quaternion, sample_wishart_real};
use dmtlab::sim::{db_to_linear, estimate_error_prob, estimate_outage, ErrorOptions, SimulationResult};
use dmtlab::{Mode, SystemConfig};
use serde_json::json;

use crate::{Command, Output, SimArgs};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] dmtlab::Error),
    #[error("{0}")]
    Invalid(String),
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    CheckFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use dmtlab::Error as E;
        match self {
            CliError::Write { .. } => 3,
            CliError::CheckFailed(_) => 1,
            CliError::Core(E::NoConvergence { .. } | E::Pairing { .. } | E::NotHermitian { .. }) => 1,
            _ => 2,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn emit(output: &Output, text: &str) -> Result<()> {
    match &output.out {
        Some(path) => write_file(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

fn load_lattice(name: &str) -> Result<MatrixLattice> {
    if let Some(l) = builtin(name) {
        return Ok(l);
    }
    let path = Path::new(name);
    if !path.exists() {
        return Err(CliError::Invalid(format!(
            "unknown lattice {name:?}: expected hamilton, split or a JSON file"
        )));
    }
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(lattice_from_json(&text)?)
}

pub fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Curves {
            n,
            m,
            step,
            anchors,
            output,
        } => curves(n, m, step, anchors.as_deref(), &output),
        Command::Outage { sim } => outage(&sim),
        Command::Error {
            lattice,
            codebook_size,
            sim,
        } => error(&lattice, codebook_size, &sim),
        Command::Lemma2Verify {
            qmax,
            lmax,
            sstep,
            gridstep,
            output,
        } => lemma2_verify(qmax, lmax, sstep, gridstep, &output),
        Command::LatticeAudit { lattice, radius, output } => lattice_audit(&lattice, radius, &output),
        Command::WishartCheck {
            mode,
            n,
            m,
            samples,
            seed,
            snr_db,
            output,
        } => wishart_check(mode, n, m, samples, seed, snr_db, &output),
    }
}

fn curves(n: usize, m: usize, step: f64, anchors: Option<&Path>, output: &Output) -> Result<()> {
    let csv = curves_csv(n, m, step)?;
    if let Some(path) = anchors {
        let mut parts = vec![
            anchors_json("d_star", &classical_dmt(n, m)?),
            anchors_json("d1", &d1_curve(n, m)?),
        ];
        if n.is_multiple_of(2) {
            parts.push(anchors_json("d2", &d2_curve(n, m)?));
        }
        write_file(path, &format!("[{}]\n", parts.join(",")))?;
    }
    emit(output, &csv)
}

fn sim_config(sim: &SimArgs) -> Result<SystemConfig> {
    Ok(SystemConfig::new(sim.n, sim.m, 1.0, sim.r)?)
}

fn finish(sim: &SimArgs, res: &SimulationResult) -> Result<()> {
    if let Some(path) = &sim.summary {
        write_file(path, &(res.slope_json() + "\n"))?;
    }
    emit(&sim.output, &res.to_csv())
}

fn outage(sim: &SimArgs) -> Result<()> {
    let cfg = sim_config(sim)?;
    let res = estimate_outage(sim.mode, &cfg, &sim.snr_db, sim.trials, sim.seed)?;
    finish(sim, &res)
}

fn error(lattice: &str, codebook_size: usize, sim: &SimArgs) -> Result<()> {
    let cfg = sim_config(sim)?;
    let lattice = Arc::new(load_lattice(lattice)?);
    let opts = ErrorOptions {
        codebook_size,
        ..ErrorOptions::default()
    };
    let res = estimate_error_prob(sim.mode, &lattice, &cfg, &sim.snr_db, sim.trials, sim.seed, &opts)?;
    finish(sim, &res)
}

fn lemma2_verify(qmax: usize, lmax: usize, sstep: f64, gridstep: f64, output: &Output) -> Result<()> {
    if qmax == 0 || lmax == 0 {
        return Err(CliError::Invalid("--qmax and --lmax must be >= 1".into()));
    }
    if sstep.is_nan() || gridstep.is_nan() || sstep <= 0.0 || gridstep <= 0.0 {
        return Err(CliError::Invalid("--sstep and --gridstep must be > 0".into()));
    }
    let mut lines = vec!["q,l,s,closed_form,bruteforce,tolerance,ok".to_string()];
    let mut bad = 0;
    let mut skipped = Vec::new();
    for q in 1..=qmax {
        for l in 1..=lmax {
            if q < l {
                skipped.push(format!("({q},{l})"));
                continue;
            }
            let steps = (l as f64 / sstep + 1e-9).floor() as usize;
            for i in 0..=steps {
                let s = i as f64 * sstep;
                let p = Lemma2Problem::new(q as f64, l, s)?;
                let (v, alpha) = lemma2_closed_form(&p);
                let b = lemma2_bruteforce(&p, gridstep)?;
                let tol = (l * (q + l)) as f64 * gridstep;
                let ok = (v - b).abs() <= tol && a0_membership(&alpha, s) && (p.objective(&alpha) - v).abs() <= 1e-12;
                if !ok {
                    bad += 1;
                }
                lines.push(format!("{q},{l},{},{},{},{},{}", s, dmtlab::dmt::tidy(v), dmtlab::dmt::tidy(b), tol, ok));
            }
        }
    }
    let mut text = String::new();
    if !skipped.is_empty() {
        text.push_str(&format!("# skipped (q,l) with q < l: {}\n", skipped.join(" ")));
    }
    text.push_str(&lines.join("\n"));
    text.push('\n');
    if bad == 0 {
        text.push_str("# all cases within tolerance\n");
        emit(output, &text)
    } else {
        text.push_str(&format!("# {bad} case(s) outside tolerance\n"));
        emit(output, &text)?;
        Err(CliError::CheckFailed(format!("{bad} case(s) outside tolerance")))
    }
}

fn lattice_audit(name: &str, radius: f64, output: &Output) -> Result<()> {
    let lattice = load_lattice(name)?;
    let a = audit(&lattice, radius)?;
    let value = json!({
        "lattice": name,
        "radius": radius,
        "points": a.points,
        "min_det": a.min_det,
        "max_integrality_error": a.max_integrality_error,
        "nvd": a.nvd,
    });
    emit(output, &(serde_json::to_string_pretty(&value).expect("json") + "\n"))
}

fn wishart_check(mode: Mode, n: usize, m: usize, samples: u64, seed: u64, snr_db: f64, output: &Output) -> Result<()> {
    if samples == 0 {
        return Err(CliError::Invalid("--samples must be >= 1".into()));
    }
    let (l, delta) = profile_shape(mode, n, m)?;
    if n == 0 || m == 0 {
        return Err(CliError::Invalid("--n and --m must be >= 1".into()));
    }
    let rho = db_to_linear(snr_db);
    let mut rng = substream(seed, 0);
    let mut trace = 0.0;
    let mut violations = 0u64;
    for _ in 0..samples {
        let prof = match mode {
            Mode::Real => sample_wishart_real(n, m, rho, &mut rng)?,
            Mode::Quaternion => sample_wishart_quaternion(n / 2, m, rho, &mut rng)?,
        };
        // full Gram trace: pairs count twice in quaternion mode
        let mult = if mode == Mode::Quaternion { 2.0 } else { 1.0 };
        trace += mult * prof.lambdas.iter().sum::<f64>();
        if log_p_alpha(mode, &prof.alphas, delta, rho) > log_p_prime(mode, &prof.alphas, delta, rho) + 1e-9 {
            violations += 1;
        }
    }
    let expected = match mode {
        Mode::Real => (m * n) as f64,
        Mode::Quaternion => (2 * m * n) as f64,
    };
    let value = json!({
        "mode": mode,
        "n": n,
        "m": m,
        "samples": samples,
        "seed": seed,
        "l": l,
        "delta": delta,
        "mean_trace": trace / samples as f64,
        "expected_trace": expected,
        "domination_violations": violations,
    });
    emit(output, &(serde_json::to_string_pretty(&value).expect("json") + "\n"))
}
