//! CSV emission: the per-step sqrt-bound table and the quality-metric
//! diagonal, both with 9-significant-digit floats and LF line endings.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

use super::RunReport;

/// Format with 9 significant digits, positional where readable.
pub fn sig9(v: f64) -> String {
    if v == 0.0 {
        return "0.00000000".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let e = v.abs().log10().floor() as i32;
    if !(-4..=14).contains(&e) {
        format!("{v:.8e}")
    } else {
        let prec = (8 - e).max(0) as usize;
        format!("{v:.prec$}")
    }
}

/// The bound table: one row per (t, state_index), sqrt of the bound
/// diagonal to match the usual plotted quantity; the theory column is empty
/// when the reference bound was not run.
pub fn bound_csv(report: &RunReport) -> String {
    let mut out = String::from("t,state_index,sqrt_pcrlb_approx,sqrt_pcrlb_theory\n");
    let n = report.bound.state_dim;
    for k in 0..report.bound.horizon() {
        let approx = report.bound.sqrt_diagonal(k);
        let theory = report.theory.as_ref().map(|th| th.sqrt_diagonal(k));
        for s in 0..n {
            let theory_field = theory.as_ref().map(|d| sig9(d[s])).unwrap_or_default();
            out.push_str(&format!("{},{},{},{}\n", k + 1, s, sig9(approx[s]), theory_field));
        }
    }
    out
}

/// Diagonal of the quality metric, one row per state index.
pub fn lambda_csv(report: &RunReport) -> Option<String> {
    let lambda = report.lambda.as_ref()?;
    let mut out = String::from("state_index,lambda_jj\n");
    for (s, v) in lambda.diagonal().iter().enumerate() {
        out.push_str(&format!("{},{}\n", s, sig9(*v)));
    }
    Some(out)
}

fn write(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Write `bound.csv`, `lambda.csv` (when the metric exists) and the config
/// echo `config.toml` into `dir`; returns the paths written.
pub fn write_outputs(report: &RunReport, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let mut written = Vec::new();
    let bound_path = dir.join("bound.csv");
    write(&bound_path, &bound_csv(report))?;
    written.push(bound_path);
    if let Some(lambda) = lambda_csv(report) {
        let path = dir.join("lambda.csv");
        write(&path, &lambda)?;
        written.push(path);
    }
    let config_path = dir.join("config.toml");
    write(&config_path, &report.config_echo)?;
    written.push(config_path);
    Ok(written)
}
