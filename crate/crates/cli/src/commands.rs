//! Implementations of the CLI verbs. Everything returns strings or file
//! lists so the binary stays a thin printing shell and tests can call the
//! same entry points.

use crate::config::{self, DatasetSpec, ExperimentConfig};
use crate::{dataset, CliError};
use duelbandit::preference::{self, BoundReport};
use duelbandit::simulator::{self, Aggregate, RegretTrace};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Environment variable supplying the default worker count for `run`;
/// the `--threads` flag wins over it.
pub const THREADS_ENV: &str = "DUELBANDIT_THREADS";

pub fn cmd_list() -> String {
    let mut out = String::new();
    let datasets = [
        ("six_rankers", None, None),
        ("cyclic", None, None),
        ("arithmetic", None, Some(8usize)),
        ("example1", Some(0.7), None),
    ];
    out.push_str("built-in datasets:\n");
    for (name, q, k) in datasets {
        let spec = dataset::spec_from_cli(name, q, k);
        let (_, m) = dataset::resolve(&spec).expect("builders resolve");
        let winner = m
            .condorcet_winner()
            .map(|w| (w + 1).to_string())
            .expect("builders have a winner");
        let params = match name {
            "arithmetic" => " (--k 2..=11, default 8)".to_string(),
            "example1" => " (--q in (0,1), required)".to_string(),
            _ => String::new(),
        };
        let _ = writeln!(
            out,
            "  {name:<12} K={}{params}  Condorcet winner: {winner}",
            m.k()
        );
    }
    out
}

pub fn cmd_validate(path: &Path) -> Result<String, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    let matrix = preference::from_csv(&text)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    Ok(match matrix.condorcet_winner() {
        Some(w) => format!("valid, K={}, Condorcet winner: {}", matrix.k(), w + 1),
        None => format!("valid, K={}, no Condorcet winner", matrix.k()),
    })
}

/// Dataset label, arm count, and the bound report for `analyze`.
pub fn analyze_report(spec: &DatasetSpec) -> Result<(String, usize, BoundReport), CliError> {
    let (label, matrix) = dataset::resolve(spec)?;
    let report = matrix
        .bound_report()
        .map_err(|e| CliError::Data(format!("{label}: {e}")))?;
    Ok((label, matrix.k(), report))
}

pub fn cmd_analyze(spec: &DatasetSpec) -> Result<String, CliError> {
    let (label, k, report) = analyze_report(spec)?;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "dataset: {label} (K={k}, Condorcet winner: {})",
        report.winner + 1
    );
    let _ = writeln!(
        out,
        "{:>4} {:>4}  {:<22} {:<22}",
        "arm", "b*", "lb_term", "rmed1_term"
    );
    for arm in &report.arms {
        let _ = writeln!(
            out,
            "{:>4} {:>4}  {:<22} {:<22}",
            arm.arm + 1,
            arm.best_opponent + 1,
            arm.true_lb_term,
            arm.lb1_term
        );
    }
    let _ = writeln!(out, "TrueLB coefficient: {}", report.true_lb);
    let _ = writeln!(out, "LB1 coefficient:    {}", report.lb1);
    Ok(out)
}

pub fn read_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
}

/// `run --print-config`: echo the parsed config as canonical JSON.
pub fn cmd_print_config(path: &Path) -> Result<String, CliError> {
    let config = read_config(path)?;
    serde_json::to_string_pretty(&config)
        .map_err(|e| CliError::Runtime(format!("cannot serialize config: {e}")))
}

/// Worker count: the flag wins, then the environment variable, then
/// one worker per core (returned as 0 so rayon decides).
pub fn resolve_threads(flag: Option<usize>) -> Result<usize, CliError> {
    if let Some(n) = flag {
        return Ok(n);
    }
    match std::env::var(THREADS_ENV) {
        Ok(value) => value
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{THREADS_ENV}='{value}' is not a thread count"))),
        Err(_) => Ok(0),
    }
}

#[derive(Debug)]
pub struct RunOutcome {
    /// Files written, in emission order.
    pub files: Vec<PathBuf>,
    /// Human-readable summary, one line per policy.
    pub lines: Vec<String>,
}

pub fn cmd_run(
    config_path: &Path,
    threads: Option<usize>,
    verbose_runs: bool,
) -> Result<RunOutcome, CliError> {
    let config = read_config(config_path)?;
    let issues = config::validate(&config);
    if !issues.is_empty() {
        return Err(CliError::Usage(format!(
            "invalid config:\n  {}",
            issues.join("\n  ")
        )));
    }
    let (dataset_label, matrix) = dataset::resolve(&config.dataset)?;
    if matrix.condorcet_winner().is_none() {
        return Err(CliError::Data(format!(
            "{dataset_label}: regret is undefined without a Condorcet winner"
        )));
    }
    let issues = config::validate_with_k(&config, matrix.k());
    if !issues.is_empty() {
        return Err(CliError::Usage(format!(
            "invalid config:\n  {}",
            issues.join("\n  ")
        )));
    }

    let checkpoints = config
        .checkpoints
        .clone()
        .unwrap_or_else(|| simulator::checkpoint_grid(config.horizon));
    let threads = resolve_threads(threads)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Runtime(format!("cannot build thread pool: {e}")))?;

    std::fs::create_dir_all(&config.output).map_err(|e| {
        CliError::Runtime(format!("cannot create {}: {e}", config.output.display()))
    })?;

    let mut outcome = RunOutcome {
        files: Vec::new(),
        lines: Vec::new(),
    };
    for policy in &config.policies {
        let label = policy.label();
        let policy_config = policy.to_policy_config(config.horizon);
        let traces = pool
            .install(|| {
                simulator::run_many(
                    &matrix,
                    &policy_config,
                    config.horizon,
                    config.runs,
                    config.base_seed,
                    &checkpoints,
                )
            })
            .map_err(|e| CliError::Runtime(format!("{label}: {e}")))?;
        let agg = simulator::aggregate(&traces)
            .map_err(|e| CliError::Runtime(format!("{label}: {e}")))?;

        let mean_path = config.output.join(format!("{label}.csv"));
        write_file(&mean_path, &mean_csv(&label, &dataset_label, &agg))?;
        outcome.files.push(mean_path);
        if verbose_runs {
            let runs_path = config.output.join(format!("{label}_runs.csv"));
            write_file(
                &runs_path,
                &runs_csv(&label, &dataset_label, config.base_seed, &traces),
            )?;
            outcome.files.push(runs_path);
        }
        outcome.lines.push(format!(
            "{label}: mean final regret {} over {} runs (wrote {label}.csv)",
            agg.mean.last().copied().unwrap_or(0.0),
            agg.runs,
        ));
    }
    Ok(outcome)
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

/// Aggregated CSV: one row per checkpoint. All numbers use '.' decimals and
/// shortest round-trip formatting, so output is locale-independent and
/// byte-stable.
fn mean_csv(policy: &str, dataset: &str, agg: &Aggregate) -> String {
    let mut out = String::from("policy,dataset,t,mean_regret,sd_regret,runs\n");
    for (idx, &t) in agg.rounds.iter().enumerate() {
        let _ = writeln!(
            out,
            "{policy},{dataset},{t},{},{},{}",
            agg.mean[idx], agg.sd[idx], agg.runs
        );
    }
    out
}

/// Per-run CSV: rows ordered by seed, then round.
fn runs_csv(policy: &str, dataset: &str, base_seed: u64, traces: &[RegretTrace]) -> String {
    let mut out = String::from("policy,dataset,seed,t,cum_regret\n");
    for (run, trace) in traces.iter().enumerate() {
        let seed = simulator::run_seed(base_seed, run as u64);
        for &(t, regret) in &trace.checkpoints {
            let _ = writeln!(out, "{policy},{dataset},{seed},{t},{regret}");
        }
    }
    out
}
