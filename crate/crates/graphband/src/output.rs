//! Header-free `t,value` CSV series and the sweep summary table.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use graphband_core::policy::PolicyKind;

use crate::error::io_err;
use crate::experiment::ExperimentResult;
use crate::{Error, Result};

pub const STATS: [&str; 3] = ["mean", "upper", "lower"];

pub fn csv_filename(kind: PolicyKind, stat: &str, label: &str, repeats: usize, action_count: usize) -> String {
    format!("{}_{stat}_regret_gtype_{label}_repeat_{repeats}_K_{action_count}.csv", kind.tag())
}

/// Writes `values[i]` as row `i + 1`.
pub fn write_csv(path: impl AsRef<Path>, values: &[f64]) -> Result<()> {
    let path = path.as_ref();
    let mut body = String::with_capacity(values.len() * 16);
    for (i, v) in values.iter().enumerate() {
        writeln!(body, "{},{v}", i + 1).unwrap();
    }
    fs::write(path, body).map_err(io_err(path))
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<(usize, f64)>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let bad = || Error::Parse { path: path.to_owned(), line: i + 1, message: format!("expected `t,value`, got {l:?}") };
            let (t, v) = l.split_once(',').ok_or_else(bad)?;
            Ok((t.trim().parse().map_err(|_| bad())?, v.trim().parse().map_err(|_| bad())?))
        })
        .collect()
}

/// Writes mean, upper and lower curves of every policy into `dir`.
pub fn write_curves(dir: impl AsRef<Path>, result: &ExperimentResult) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let cfg = &result.config;
    let mut written = Vec::new();
    for o in &result.outcomes {
        for (stat, series) in STATS.iter().zip([&o.curves.mean, &o.curves.upper, &o.curves.lower]) {
            let path = dir.join(csv_filename(o.kind, stat, &result.label, cfg.repeats, cfg.action_count));
            write_csv(&path, series)?;
            written.push(path);
        }
    }
    Ok(written)
}

/// One row per action count, one `mean (std)` column per policy.
pub fn summary_table(results: &[ExperimentResult]) -> String {
    let Some(first) = results.first() else { return String::new() };
    let mut out = String::from("K");
    for o in &first.outcomes {
        write!(out, "\t{}", o.kind).unwrap();
    }
    out.push('\n');
    for r in results {
        write!(out, "{}", r.config.action_count).unwrap();
        for o in &r.outcomes {
            let (m, s) = o.final_mean_std();
            write!(out, "\t{m:.2} ({s:.2})").unwrap();
        }
        out.push('\n');
    }
    out
}

/// Policies whose mean final regret grows somewhere along the sweep.
pub fn non_monotone_policies(results: &[ExperimentResult]) -> Vec<PolicyKind> {
    let Some(first) = results.first() else { return Vec::new() };
    first
        .outcomes
        .iter()
        .map(|o| o.kind)
        .filter(|&k| {
            let means: Vec<f64> = results.iter().filter_map(|r| r.outcome(k)).map(|o| o.final_mean_std().0).collect();
            means.windows(2).any(|w| w[1] > w[0])
        })
        .collect()
}
