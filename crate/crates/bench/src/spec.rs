//! Sweep configuration: the JSON schema read by the CLI and its validation.
//!
//! Lengths are given in wavelengths. [`SweepSpec::resolve`] checks the whole
//! spec, reports every violation at once, and converts to meters.

use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;

use hmimo_core::{ModelVariant, PPolicy, SPEED_OF_LIGHT};
use serde::{Deserialize, Serialize};

use crate::error::BenchError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Distance,
    TxElements,
    SinglePoint,
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Experiment::Distance => "distance",
            Experiment::TxElements => "tx-elements",
            Experiment::SinglePoint => "single-point",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Center distance in wavelengths: an inclusive range for distance sweeps,
/// a list of fixed values for element sweeps, or one value for a single point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DistanceSpec {
    Range { start: f64, stop: f64, step: f64 },
    Values(Vec<f64>),
    Single(f64),
}

impl DistanceSpec {
    fn fixed_values(&self) -> Vec<f64> {
        match self {
            DistanceSpec::Range { .. } => Vec::new(),
            DistanceSpec::Values(v) => v.clone(),
            DistanceSpec::Single(d) => vec![*d],
        }
    }
}

fn default_true() -> bool {
    true
}

fn is_zero(v: &usize) -> bool {
    *v == 0
}

fn is_default_angle(v: &f64) -> bool {
    *v == 0.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub experiment: Experiment,
    /// TX grid `(n_h, n_v)`; element sweeps replace it with `n × n` from `n_list`.
    pub tx_grid: (usize, usize),
    pub rx_grid: (usize, usize),
    pub spacing_lambda: f64,
    pub d0_range_lambda: DistanceSpec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub n_list: Vec<usize>,
    pub variants: Vec<ModelVariant>,
    pub frequency: f64,
    pub snr_db: f64,
    #[serde(default)]
    pub p_policy: PPolicy,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    #[serde(default)]
    pub output_format: OutputFormat,
    /// Emit NMSE columns (against OCM) for every non-OCM variant.
    #[serde(default = "default_true")]
    pub nmse: bool,
    /// Elevation and azimuth of the link direction, radians.
    #[serde(default, skip_serializing_if = "is_default_angle")]
    pub theta: f64,
    #[serde(default, skip_serializing_if = "is_default_angle")]
    pub phi: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub dump_singular_values: usize,
}

pub const DEFAULT_FREQUENCY: f64 = 2.4e9;
pub const DEFAULT_SNR_DB: f64 = 10.0;

impl SweepSpec {
    fn baseline(experiment: Experiment, d0: DistanceSpec) -> Self {
        Self {
            experiment,
            tx_grid: (41, 41),
            rx_grid: (15, 15),
            spacing_lambda: 0.01,
            d0_range_lambda: d0,
            n_list: Vec::new(),
            variants: ModelVariant::ALL.to_vec(),
            frequency: DEFAULT_FREQUENCY,
            snr_db: DEFAULT_SNR_DB,
            p_policy: PPolicy::default(),
            output_path: None,
            output_format: OutputFormat::Csv,
            nmse: true,
            theta: 0.0,
            phi: 0.0,
            workers: None,
            dump_singular_values: 0,
        }
    }

    /// 41×41 TX, 15×15 RX, 0.01λ spacing, d0 from 0.25λ to 4.25λ in 0.25λ steps.
    pub fn baseline_distance() -> Self {
        Self::baseline(
            Experiment::Distance,
            DistanceSpec::Range { start: 0.25, stop: 4.25, step: 0.25 },
        )
    }

    /// TX sides 9, 13, …, 41 against a 15×15 RX at d0 = 0.75λ and 2.5λ.
    pub fn baseline_elements() -> Self {
        let mut spec = Self::baseline(Experiment::TxElements, DistanceSpec::Values(vec![0.75, 2.5]));
        spec.n_list = (9..=41).step_by(4).collect();
        spec
    }

    pub fn baseline_point() -> Self {
        Self::baseline(Experiment::SinglePoint, DistanceSpec::Single(4.25))
    }

    pub fn default_for(experiment: Experiment) -> Self {
        match experiment {
            Experiment::Distance => Self::baseline_distance(),
            Experiment::TxElements => Self::baseline_elements(),
            Experiment::SinglePoint => Self::baseline_point(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, BenchError> {
        serde_json::from_str(text).map_err(|e| BenchError::Config(vec![format!("config parse error: {e}")]))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sweep spec serializes")
    }

    /// Validates every field and converts wavelength-relative lengths to meters.
    pub fn resolve(&self) -> Result<ResolvedSweep, BenchError> {
        let mut errs = Vec::new();

        if !(self.frequency > 0.0 && self.frequency.is_finite()) {
            errs.push(format!("frequency must be positive, got {}", self.frequency));
        }
        if !(self.spacing_lambda > 0.0 && self.spacing_lambda.is_finite()) {
            errs.push(format!("spacing_lambda must be positive, got {}", self.spacing_lambda));
        }
        for (name, (h, v)) in [("tx_grid", self.tx_grid), ("rx_grid", self.rx_grid)] {
            if h == 0 || v == 0 {
                errs.push(format!("{name} must have positive counts, got ({h}, {v})"));
            }
        }
        if !self.snr_db.is_finite() {
            errs.push(format!("snr_db must be finite, got {}", self.snr_db));
        }
        if let Err(e) = self.p_policy.validate() {
            errs.push(format!("p_policy: {e}"));
        }
        if self.workers == Some(0) {
            errs.push("workers must be at least 1".into());
        }
        if !self.theta.is_finite() || !self.phi.is_finite() {
            errs.push("theta and phi must be finite".into());
        }

        let unique: BTreeSet<ModelVariant> = self.variants.iter().copied().collect();
        if self.variants.is_empty() {
            errs.push("variants must not be empty".into());
        } else if unique.len() != self.variants.len() {
            errs.push("variants must not repeat".into());
        }
        let wants_nmse = self.nmse && unique.iter().any(|v| *v != ModelVariant::Ocm);
        if wants_nmse && !unique.contains(&ModelVariant::Ocm) {
            errs.push("NMSE output requires OCM among the variants (it is the reference)".into());
        }

        let mut d0_lambda = Vec::new();
        match (self.experiment, &self.d0_range_lambda) {
            (Experiment::Distance, DistanceSpec::Range { start, stop, step }) => {
                if !(*step > 0.0 && step.is_finite()) {
                    errs.push(format!("d0_range_lambda.step must be positive, got {step}"));
                } else if !(*start > 0.0 && start.is_finite()) {
                    errs.push(format!("d0_range_lambda.start must be positive, got {start}"));
                } else if !(stop >= start && stop.is_finite()) {
                    errs.push(format!("d0_range_lambda is empty ({start} .. {stop})"));
                } else {
                    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
                    d0_lambda = (0..count).map(|i| start + i as f64 * step).collect();
                }
            }
            (Experiment::Distance, _) => {
                errs.push("distance sweep needs d0_range_lambda as {start, stop, step}".into());
            }
            (Experiment::TxElements, DistanceSpec::Range { .. }) => {
                errs.push("element sweep needs fixed d0 values, not a range".into());
            }
            (Experiment::SinglePoint, d) if d.fixed_values().len() != 1 => {
                errs.push("single-point run needs exactly one d0 value".into());
            }
            (_, d) => {
                let values = d.fixed_values();
                if values.is_empty() {
                    errs.push("d0_range_lambda must not be empty".into());
                }
                for v in &values {
                    if !(*v > 0.0 && v.is_finite()) {
                        errs.push(format!("d0 values must be positive, got {v}"));
                    }
                }
                d0_lambda = values;
            }
        }

        let tx_sides: Vec<(usize, usize)> = match self.experiment {
            Experiment::TxElements => {
                if self.n_list.is_empty() {
                    errs.push("n_list must not be empty for an element sweep".into());
                }
                if self.n_list.contains(&0) {
                    errs.push("n_list entries must be positive".into());
                }
                self.n_list.iter().map(|&n| (n, n)).collect()
            }
            _ => {
                if !self.n_list.is_empty() {
                    errs.push(format!("n_list is only used by tx-elements sweeps ({})", self.experiment));
                }
                vec![self.tx_grid]
            }
        };

        if !errs.is_empty() {
            return Err(BenchError::Config(errs));
        }

        let lambda = SPEED_OF_LIGHT / self.frequency;
        let mut variants: Vec<ModelVariant> = unique.into_iter().collect();
        variants.sort();
        Ok(ResolvedSweep {
            experiment: self.experiment,
            lambda,
            spacing: self.spacing_lambda * lambda,
            tx_sides,
            rx_grid: self.rx_grid,
            d0_lambda,
            variants,
            nmse: wants_nmse,
            frequency: self.frequency,
            snr_db: self.snr_db,
            p_policy: self.p_policy,
            theta: self.theta,
            phi: self.phi,
            workers: self.workers.unwrap_or(1),
            dump_singular_values: self.dump_singular_values,
        })
    }
}

/// A validated sweep with lengths in meters.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedSweep {
    pub experiment: Experiment,
    pub lambda: f64,
    pub spacing: f64,
    pub tx_sides: Vec<(usize, usize)>,
    pub rx_grid: (usize, usize),
    pub d0_lambda: Vec<f64>,
    /// Sorted by label.
    pub variants: Vec<ModelVariant>,
    pub nmse: bool,
    pub frequency: f64,
    pub snr_db: f64,
    pub p_policy: PPolicy,
    pub theta: f64,
    pub phi: f64,
    pub workers: usize,
    pub dump_singular_values: usize,
}
