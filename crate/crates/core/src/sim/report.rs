//! CSV and JSON renderings of simulation results.

use serde::Serialize;

use crate::channel::Mode;
use crate::dmt::{d1_curve, d2_curve};
use crate::sim::slope::SlopeEstimate;

pub const CSV_HEADER: &str = "snr_db,rate_bits,trials,events,prob,stderr";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantity {
    Outage,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationResult {
    pub quantity: Quantity,
    pub mode: Mode,
    pub n: usize,
    pub m: usize,
    pub r: f64,
    pub seed: u64,
    pub rate_bits: Vec<f64>,
    pub estimate: SlopeEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeSummary {
    pub mode: Mode,
    pub n: usize,
    pub m: usize,
    pub r: f64,
    pub slope: Option<f64>,
    pub stderr: Option<f64>,
    pub theory_d1: Option<f64>,
    pub theory_d2: Option<f64>,
}

impl SimulationResult {
    /// One comment line with the run parameters, then the table.
    pub fn to_csv(&self) -> String {
        let q = match self.quantity {
            Quantity::Outage => "outage",
            Quantity::Error => "error",
        };
        let mut out = format!(
            "# {q} mode={} n={} m={} r={} seed={}\n{CSV_HEADER}\n",
            self.mode, self.n, self.m, self.r, self.seed
        );
        let est = &self.estimate;
        let se = est.prob_stderr();
        for (i, db) in est.snr_db.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                db, self.rate_bits[i], est.trials[i], est.events[i], est.probs[i], se[i]
            ));
        }
        out
    }

    pub fn summary(&self) -> SlopeSummary {
        let d1 = d1_curve(self.n, self.m).ok().and_then(|c| c.eval_extended(self.r).ok());
        let d2 = d2_curve(self.n, self.m).ok().and_then(|c| c.eval_extended(self.r).ok());
        SlopeSummary {
            mode: self.mode,
            n: self.n,
            m: self.m,
            r: self.r,
            slope: self.estimate.slope,
            stderr: self.estimate.stderr,
            theory_d1: d1,
            theory_d2: d2,
        }
    }

    pub fn slope_json(&self) -> String {
        serde_json::to_string_pretty(&self.summary()).expect("summary serializes")
    }
}
