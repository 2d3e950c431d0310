//! Replica orchestration and statistical confrontation of simulated
//! lattices with the closed-form predictions.
//!
//! Replicas run in parallel, each on its own RNG stream keyed by
//! (seed, experiment/size, replica index); results are collected in replica
//! order and reduced sequentially, so outputs do not depend on the number
//! of worker threads.

pub mod checks;
mod experiments;
mod ks;
mod plan;
mod stats;

use std::io::{self, Write};

use serde::Serialize;

use crate::format::format_real;

pub use experiments::{
    burke_ks_suite, burke_ks_test, burke_negative_control, mc_lln_gap, mc_lmgf, mc_mean_log_z, right_tail_estimate,
    variance_exponent_scan, verify_lln, verify_mean_identity, BurkeOutcome, LlnRow, LmgfRow, MeanRow, TailRow,
    VarianceRow, VarianceScan,
};
pub use ks::{kolmogorov_sf, ks_statistic, ks_test, ks_test_gamma, KsResult};
pub use plan::{Estimator, ExperimentPlan};
pub use stats::{
    lag1_autocorrelation, line_fit, log_variance_stderr, normal_sf, weighted_line_fit, wilson_interval, LineFit,
    SampleStats, Welford,
};

/// Outcome of a statistical or numerical check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestReport {
    pub name: String,
    #[serde(serialize_with = "crate::format::serialize_real")]
    pub statistic: f64,
    /// In [0, 1].
    #[serde(serialize_with = "crate::format::serialize_real")]
    pub p_value: f64,
    #[serde(serialize_with = "crate::format::serialize_real")]
    pub level: f64,
    pub pass: bool,
    pub metadata: serde_json::Value,
}

impl TestReport {
    pub fn new(name: &str, statistic: f64, p_value: f64, level: f64, pass: bool, metadata: serde_json::Value) -> Self {
        let p_value = if p_value.is_nan() { 0.0 } else { p_value.clamp(0.0, 1.0) };
        TestReport { name: name.to_string(), statistic, p_value, level, pass, metadata }
    }

    /// One-line human summary.
    pub fn summary(&self) -> String {
        format!(
            "{}: {} (statistic {}, p {})",
            self.name,
            if self.pass { "pass" } else { "FAIL" },
            format_real(self.statistic),
            format_real(self.p_value)
        )
    }
}

/// Plot-ready numeric table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&x| format_real(x)).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }

    /// One JSON object per row.
    pub fn to_json_records(&self) -> Vec<serde_json::Value> {
        self.rows
            .iter()
            .map(|row| {
                let map = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, &x)| (c.to_string(), crate::format::real_to_json(x)))
                    .collect();
                serde_json::Value::Object(map)
            })
            .collect()
    }
}

pub type ExperimentPlan64 = ExperimentPlan<f64>;
