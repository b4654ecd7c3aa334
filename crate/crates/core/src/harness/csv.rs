use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{RunRecord, SummaryStats};
use crate::error::{Error, Result};

pub const SUMMARY_FILE: &str = "summary.csv";
pub const FINAL_FILE: &str = "final_stats.csv";
pub const RUNS_FILE: &str = "runs.csv";

/// Formats `x` with six significant digits, trimming trailing zeros, in the
/// style of C's `%g`.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        // Rounding can carry into a seventh digit (999999.5 -> 1000000).
        if s.trim_start_matches('-').split('.').next().map_or(0, str::len) > 6 {
            return format_sig6_exp(x);
        }
        trim_zeros(s)
    } else {
        format_sig6_exp(x)
    }
}

fn format_sig6_exp(x: f64) -> String {
    let s = format!("{x:.5e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent form");
    format!("{}e{exp}", trim_zeros(mantissa.to_string()))
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Writes `summary.csv` (per-timestep mean and standard error),
/// `final_stats.csv` (one row of end-of-run statistics) and `runs.csv`
/// (per-run seed and final value) into `dir`, creating it if needed.
pub fn write_csv(stats: &SummaryStats, records: &[RunRecord], dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let mut summary = String::from("t,meanG,stderrG\n");
    for (t, (m, s)) in stats.mean.iter().zip(&stats.stderr).enumerate() {
        let _ = writeln!(summary, "{},{},{}", t + 1, format_sig6(*m), format_sig6(*s));
    }

    let mut fin = String::from("algorithm,utility,meanG,stderr,best,worst,percentOptimum\n");
    let _ = writeln!(
        fin,
        "{},{},{},{},{},{},{}",
        stats.algorithm,
        stats.utility.map_or_else(|| "none".to_string(), |u| u.to_string()),
        format_sig6(stats.final_mean),
        format_sig6(stats.final_stderr),
        format_sig6(stats.best),
        format_sig6(stats.worst),
        format_sig6(stats.percent_optimum),
    );

    let mut runs = String::from("run,seed,finalG\n");
    for r in records {
        let _ = writeln!(runs, "{},{},{}", r.run, r.seed, format_sig6(r.final_value()));
    }

    for (name, body) in [(SUMMARY_FILE, summary), (FINAL_FILE, fin), (RUNS_FILE, runs)] {
        let path = dir.join(name);
        fs::write(&path, body).map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}
