//! Resolution of dataset specs to labeled preference matrices.

use crate::config::DatasetSpec;
use crate::CliError;
use duelbandit::preference::{self, PreferenceMatrix};
use std::path::Path;

pub const BUILDER_NAMES: [&str; 4] = ["six_rankers", "cyclic", "arithmetic", "example1"];

/// Config-level problems with a builder spec (unknown name, bad or missing
/// parameters). Empty means resolvable.
pub fn builder_issues(name: &str, q: Option<f64>, k: Option<usize>) -> Vec<String> {
    let mut issues = Vec::new();
    match name {
        "six_rankers" | "cyclic" => {
            if q.is_some() || k.is_some() {
                issues.push(format!("dataset {name} takes no parameters"));
            }
        }
        "arithmetic" => {
            if q.is_some() {
                issues.push("dataset arithmetic takes no q parameter".to_string());
            }
            let k = k.unwrap_or(8);
            if !(2..=11).contains(&k) {
                issues.push(format!("dataset arithmetic supports 2..=11 arms, got {k}"));
            }
        }
        "example1" => {
            if k.is_some() {
                issues.push("dataset example1 takes no k parameter".to_string());
            }
            match q {
                None => issues.push("dataset example1 requires q".to_string()),
                Some(q) if !(q > 0.0 && q < 1.0) => issues.push(format!(
                    "example1 requires q strictly inside (0, 1), got {q}"
                )),
                _ => {}
            }
        }
        other => issues.push(format!(
            "unknown dataset '{other}' (expected one of {})",
            BUILDER_NAMES.join(", ")
        )),
    }
    issues
}

fn csv_label(path: &Path) -> String {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "matrix".to_string());
    let cleaned: String = stem
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.') {
                c
            } else {
                '_'
            }
        })
        .collect();
    if cleaned.is_empty() {
        "matrix".to_string()
    } else {
        cleaned
    }
}

/// Load the matrix a spec describes, together with its display label.
/// Builder parameter problems are usage errors; CSV problems are data
/// errors.
pub fn resolve(spec: &DatasetSpec) -> Result<(String, PreferenceMatrix), CliError> {
    match spec {
        DatasetSpec::Builder { name, q, k } => {
            let issues = builder_issues(name, *q, *k);
            if !issues.is_empty() {
                return Err(CliError::Usage(issues.join("\n")));
            }
            Ok(match name.as_str() {
                "six_rankers" => ("six_rankers".to_string(), preference::six_rankers()),
                "cyclic" => ("cyclic".to_string(), preference::cyclic()),
                "arithmetic" => {
                    let k = k.unwrap_or(8);
                    (
                        format!("arithmetic-k{k}"),
                        preference::arithmetic(k).map_err(|e| CliError::Usage(e.to_string()))?,
                    )
                }
                "example1" => {
                    let q = q.expect("checked above");
                    (
                        format!("example1-q{q}"),
                        preference::example1(q).map_err(|e| CliError::Usage(e.to_string()))?,
                    )
                }
                _ => unreachable!("builder_issues rejects unknown names"),
            })
        }
        DatasetSpec::Csv { path } => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
            let matrix = preference::from_csv(&text)
                .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
            Ok((csv_label(path), matrix))
        }
    }
}

/// Interpret a CLI dataset argument: a known builder name becomes a builder
/// spec (with the optional parameters), anything else is a CSV path.
pub fn spec_from_cli(dataset: &str, q: Option<f64>, k: Option<usize>) -> DatasetSpec {
    if BUILDER_NAMES.contains(&dataset) {
        DatasetSpec::Builder {
            name: dataset.to_string(),
            q,
            k,
        }
    } else {
        DatasetSpec::Csv {
            path: dataset.into(),
        }
    }
}
