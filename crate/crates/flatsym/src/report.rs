//! Serializable experiment configs and report envelopes.
//!
//! Every report embeds the full config it was produced from plus a content
//! hash of that config, so a report file alone identifies its experiment.
//! Identical configs and seeds produce byte-identical reports.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::dichotomy::{Classification, ExponentPrediction, GrowthReport, MinKReport};
use crate::seed::fnv1a64;
use crate::spaces::PointClass;

/// Flat bag of experiment parameters; unused fields stay None and are
/// omitted from serialized output.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct ExperimentConfig {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub space: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kmax: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub levels: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub factors: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strict: Option<bool>,
}

impl ExperimentConfig {
    /// Hash of the canonical JSON encoding.
    pub fn content_hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        format!("{:016x}", fnv1a64(canonical.as_bytes()))
    }
}

/// One radius of a growth report in serialized form.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PartialRow {
    #[serde(rename = "R")]
    pub r: f64,
    #[serde(rename = "I")]
    pub i: f64,
    pub stderr: f64,
}

/// JSON envelope for `dichotomy scan` / `dichotomy min-k` outputs.
#[derive(Clone, Debug, Serialize)]
pub struct DichotomyReport {
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub space: String,
    pub point: Vec<f64>,
    pub class: PointClass,
    pub k: u32,
    pub partials: Vec<PartialRow>,
    pub classification: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope_or_exponent: Option<f64>,
    pub predicted_exponents: BTreeMap<String, ExponentPrediction>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<MinKReport>,
}

impl DichotomyReport {
    pub fn from_growth(
        config: ExperimentConfig,
        space: String,
        point: Vec<f64>,
        class: PointClass,
        k: u32,
        report: &GrowthReport,
        verdict: Option<MinKReport>,
    ) -> Self {
        let config_hash = config.content_hash();
        Self {
            config,
            config_hash,
            space,
            point,
            class,
            k,
            partials: report
                .rows
                .iter()
                .map(|row| PartialRow {
                    r: row.radius,
                    i: row.partial,
                    stderr: row.partial_stderr,
                })
                .collect(),
            classification: report.classification.label().to_string(),
            slope_or_exponent: match report.classification {
                Classification::LogDivergent { slope, .. } => Some(slope),
                Classification::PolyDivergent { exponent, .. } => Some(exponent),
                _ => None,
            },
            predicted_exponents: report.predicted_exponents.clone(),
            verdict,
        }
    }
}

/// (R, I, stderr) series as plain CSV with a header row.
pub fn growth_csv(report: &GrowthReport) -> String {
    let mut out = String::from("R,I,stderr,increment,increment_stderr\n");
    for row in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.radius, row.partial, row.partial_stderr, row.increment, row.increment_stderr
        ));
    }
    out
}

/// (λ..., value) series as CSV; `header` names the coordinate columns.
pub fn series_csv(header: &[&str], rows: &[(Vec<f64>, Vec<f64>)]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for (key, values) in rows {
        let fields: Vec<String> = key
            .iter()
            .chain(values.iter())
            .map(|v| format!("{v}"))
            .collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_roundtrips_and_hash_is_stable() {
        let config = ExperimentConfig {
            command: "dichotomy scan".into(),
            space: Some("rank1:AI".into()),
            t: Some(1.0),
            k: Some(2),
            seed: Some(42),
            ..Default::default()
        };
        let json = serde_json::to_string(&config).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, config);
        assert_eq!(config.content_hash(), back.content_hash());

        let mut other = config.clone();
        other.seed = Some(43);
        assert_ne!(config.content_hash(), other.content_hash());
    }

    #[test]
    fn csv_has_header_and_rows() {
        let rows = vec![(vec![1.0, 2.0], vec![0.5]), (vec![2.0, 1.0], vec![0.25])];
        let csv = series_csv(&["l1", "l2", "phi"], &rows);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "l1,l2,phi");
        assert!(lines[1].starts_with("1,2,"));
    }
}
