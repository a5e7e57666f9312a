//! Experiment configuration: JSON schema, defaults, and exhaustive
//! validation.
//!
//! Defaults follow the standard parameterization: `f(K) = 0.3 K^1.01`
//! (c = 0.3, eps = 0.01), `alpha = 3` for RMED2/RMED2FH, and `alpha = 0.51`
//! for RUCB.

use duelbandit::policy::{PolicyConfig, RmedConfig, RucbConfig};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

fn default_c() -> f64 {
    0.3
}
fn default_eps() -> f64 {
    0.01
}
fn default_alpha() -> f64 {
    3.0
}
fn default_rucb_alpha() -> f64 {
    0.51
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dataset: DatasetSpec,
    pub policies: Vec<PolicySpec>,
    pub horizon: u64,
    pub runs: u64,
    pub base_seed: u64,
    /// Directory the per-policy CSV files are written into.
    pub output: PathBuf,
    /// Optional override of the log-spaced checkpoint grid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checkpoints: Option<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum DatasetSpec {
    /// One of the built-in matrices: six_rankers, cyclic, arithmetic
    /// (`k`, default 8), example1 (`q`, required).
    Builder {
        name: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        q: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k: Option<usize>,
    },
    /// A preference matrix loaded from a CSV file.
    Csv { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algo", rename_all = "snake_case", deny_unknown_fields)]
pub enum PolicySpec {
    Rmed1 {
        #[serde(default = "default_c")]
        c: f64,
        #[serde(default = "default_eps")]
        eps: f64,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        flip_gap_sign: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
    },
    Rmed2 {
        #[serde(default = "default_c")]
        c: f64,
        #[serde(default = "default_eps")]
        eps: f64,
        #[serde(default = "default_alpha")]
        alpha: f64,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        flip_gap_sign: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
    },
    Rmed2fh {
        #[serde(default = "default_c")]
        c: f64,
        #[serde(default = "default_eps")]
        eps: f64,
        #[serde(default = "default_alpha")]
        alpha: f64,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        flip_gap_sign: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
    },
    Rucb {
        #[serde(default = "default_rucb_alpha")]
        alpha: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
    },
}

impl PolicySpec {
    /// Column/file label: explicit when given, otherwise derived from the
    /// algorithm and its parameters so distinct specs get distinct labels.
    pub fn label(&self) -> String {
        let flip = |f: bool| if f { "-flipgap" } else { "" };
        match self {
            PolicySpec::Rmed1 { label: Some(l), .. }
            | PolicySpec::Rmed2 { label: Some(l), .. }
            | PolicySpec::Rmed2fh { label: Some(l), .. }
            | PolicySpec::Rucb { label: Some(l), .. } => l.clone(),
            PolicySpec::Rmed1 {
                c,
                eps,
                flip_gap_sign,
                ..
            } => format!("rmed1-c{c}-eps{eps}{}", flip(*flip_gap_sign)),
            PolicySpec::Rmed2 {
                c,
                eps,
                alpha,
                flip_gap_sign,
                ..
            } => format!("rmed2-c{c}-eps{eps}-alpha{alpha}{}", flip(*flip_gap_sign)),
            PolicySpec::Rmed2fh {
                c,
                eps,
                alpha,
                flip_gap_sign,
                ..
            } => format!("rmed2fh-c{c}-eps{eps}-alpha{alpha}{}", flip(*flip_gap_sign)),
            PolicySpec::Rucb { alpha, .. } => format!("rucb-alpha{alpha}"),
        }
    }

    /// Build the engine-side policy config; RMED2FH takes the experiment
    /// horizon.
    pub fn to_policy_config(&self, horizon: u64) -> PolicyConfig {
        match *self {
            PolicySpec::Rmed1 {
                c,
                eps,
                flip_gap_sign,
                ..
            } => PolicyConfig::Rmed(RmedConfig {
                flip_gap_sign,
                ..RmedConfig::rmed1(c, eps)
            }),
            PolicySpec::Rmed2 {
                c,
                eps,
                alpha,
                flip_gap_sign,
                ..
            } => PolicyConfig::Rmed(RmedConfig {
                flip_gap_sign,
                ..RmedConfig::rmed2(c, eps, alpha)
            }),
            PolicySpec::Rmed2fh {
                c,
                eps,
                alpha,
                flip_gap_sign,
                ..
            } => PolicyConfig::Rmed(RmedConfig {
                flip_gap_sign,
                ..RmedConfig::rmed2fh(c, eps, alpha, horizon)
            }),
            PolicySpec::Rucb { alpha, .. } => PolicyConfig::Rucb(RucbConfig { alpha }),
        }
    }
}

fn label_is_clean(label: &str) -> bool {
    !label.is_empty()
        && label
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
}

/// Every problem with the config that can be detected before loading the
/// dataset. Empty means valid.
pub fn validate(config: &ExperimentConfig) -> Vec<String> {
    let mut issues = Vec::new();
    if config.runs < 1 {
        issues.push("runs must be at least 1".to_string());
    }
    if config.horizon < 1 {
        issues.push("horizon must be at least 1".to_string());
    }
    if config.policies.is_empty() {
        issues.push("at least one policy is required".to_string());
    }
    let mut labels = Vec::new();
    for (idx, policy) in config.policies.iter().enumerate() {
        let label = policy.label();
        if !label_is_clean(&label) {
            issues.push(format!(
                "policy {}: label '{label}' may only contain [A-Za-z0-9._-]",
                idx + 1
            ));
        }
        if labels.contains(&label) {
            issues.push(format!(
                "policy {}: duplicate label '{label}' (set explicit labels)",
                idx + 1
            ));
        }
        labels.push(label.clone());
        if let Err(e) = policy.to_policy_config(config.horizon.max(1)).validate() {
            issues.push(format!("policy {} ({label}): {e}", idx + 1));
        }
    }
    if let DatasetSpec::Builder { name, q, k } = &config.dataset {
        issues.extend(crate::dataset::builder_issues(name, *q, *k));
    }
    if let Some(cps) = &config.checkpoints {
        if cps.is_empty() {
            issues.push("checkpoints override must not be empty".to_string());
        }
        if !cps.windows(2).all(|w| w[0] < w[1]) {
            issues.push("checkpoints must be strictly increasing".to_string());
        }
        if cps.first().is_some_and(|&c| c < 1) {
            issues.push("checkpoints must start at round 1 or later".to_string());
        }
        if cps.last().is_some_and(|&c| c > config.horizon) {
            issues.push("checkpoints must not exceed the horizon".to_string());
        }
    }
    issues
}

/// Problems only detectable once the dataset (and therefore K) is known.
pub fn validate_with_k(config: &ExperimentConfig, k: usize) -> Vec<String> {
    let mut issues = Vec::new();
    for policy in &config.policies {
        let label = policy.label();
        let required = policy.to_policy_config(config.horizon).initial_rounds(k);
        if config.horizon < required {
            issues.push(format!(
                "policy {label}: horizon {} is shorter than the initial phase ({required} rounds for K={k})",
                config.horizon
            ));
        }
    }
    issues
}
