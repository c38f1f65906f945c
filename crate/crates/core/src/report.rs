//! Deterministic report rendering.
//!
//! Reports exist to be diffed: two runs with the same config and build must
//! produce byte-identical files, so every emitter here renders floats with
//! a fixed 12-significant-digit scheme, writes no timestamps or absolute
//! paths, and derives all content from the report structs alone.  The CSV
//! header carries a schema version line, the verbatim TOML echo of the
//! config (sufficient to reproduce the run), the derived constants of the
//! run, and — when enough rows converged — the fitted decay rates.
//!
//! Two formats are emitted.  `csv` is one file with a fixed column order:
//!
//!   eps, excess, lambda, eps_lambda, delta, eps_delta,
//!   min_w_plus_one, omega, omega_over_eps2, limsup_quotient
//!
//! `plotdata` is one two-column file per curve (ε against the column),
//! directly consumable by gnuplot or any plotting tool.  Unavailable values
//! render as `nan` in both formats; plotting tools treat them as gaps.

use crate::error::{Error, Result};
use crate::profile::TransitionProfile;
use crate::radial::{RadialProblem, RadialSolveResult};
use crate::rearrange::RadialProfile;
use crate::sweep::{fit_rates, SweepReport};

use std::path::{Path, PathBuf};

/// Schema identifier of the sweep CSV; bumped on any column change.
pub const SWEEP_SCHEMA: &str = "wulffsweep sweep schema 1";

/// Schema identifier of the plot-data files.
pub const PLOTDATA_SCHEMA: &str = "wulffsweep plotdata schema 1";

/// The fixed sweep column order, shared by the CSV and plot-data emitters.
pub const SWEEP_COLUMNS: [&str; 10] = [
    "eps",
    "excess",
    "lambda",
    "eps_lambda",
    "delta",
    "eps_delta",
    "min_w_plus_one",
    "omega",
    "omega_over_eps2",
    "limsup_quotient",
];

/// Renders a float with 12 significant digits in scientific notation,
/// normalizing −0 to 0 and spelling non-finite values `nan`/`inf`/`-inf`.
pub fn sig12(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

fn row_values(row: &crate::sweep::SweepRow) -> [f64; 10] {
    [
        row.eps,
        row.excess,
        row.lambda,
        row.eps_lambda,
        row.delta,
        row.eps_delta,
        row.min_w_plus_one,
        row.omega,
        row.omega_over_eps2,
        row.limsup_quotient,
    ]
}

/// Renders the sweep report as a single self-describing CSV document.
pub fn sweep_csv(report: &SweepReport) -> String {
    let mut out = String::new();
    out.push_str("# ");
    out.push_str(SWEEP_SCHEMA);
    out.push('\n');
    out.push_str("# config:\n");
    for line in report.config.to_toml_string().lines() {
        out.push_str("#   ");
        out.push_str(line);
        out.push('\n');
    }
    for (name, value) in [
        ("c_w", report.c_w),
        ("tau_w", report.tau_w),
        ("kappa", report.kappa),
        ("r", report.radius),
        ("lambda0", report.lambda0),
    ] {
        out.push_str(&format!("# derived: {name} = {}\n", sig12(value)));
    }
    out.push_str(&format!("# complete = {}\n", report.complete));
    if let Ok(rates) = fit_rates(report) {
        for (name, value) in [
            ("excess", rates.excess),
            ("omega", rates.omega),
            ("eps_lambda", rates.eps_lambda),
            ("eps_delta", rates.eps_delta),
        ] {
            out.push_str(&format!("# rate: {name} = {}\n", sig12(value)));
        }
    }
    out.push_str(&SWEEP_COLUMNS.join(","));
    out.push('\n');
    for row in &report.rows {
        let rendered: Vec<String> = row_values(row).iter().map(|&v| sig12(v)).collect();
        out.push_str(&rendered.join(","));
        out.push('\n');
    }
    out
}

/// Renders the sweep as one two-column file per value column, returning
/// (file name, contents) pairs.  Empty reports yield header-only files.
pub fn sweep_plotdata(report: &SweepReport) -> Vec<(String, String)> {
    SWEEP_COLUMNS[1..]
        .iter()
        .enumerate()
        .map(|(k, column)| {
            let mut text = format!("# {PLOTDATA_SCHEMA}: {column} vs eps\n");
            for row in &report.rows {
                let values = row_values(row);
                text.push_str(&format!("{} {}\n", sig12(values[0]), sig12(values[k + 1])));
            }
            (format!("sweep_{column}.dat"), text)
        })
        .collect()
}

/// Renders one radial solve as CSV with columns (t, rho, w, el_defect):
/// the stretched coordinate, the physical radius, the minimizer, and the
/// interior Euler–Lagrange defect.
pub fn solve_csv(problem: &RadialProblem, result: &RadialSolveResult) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "# wulffsweep solve schema 1: eps = {}, r = {}, lambda = {}\n",
        sig12(problem.eps()),
        sig12(problem.radius()),
        sig12(result.lambda)
    ));
    out.push_str("t,rho,w,el_defect\n");
    for (k, &t) in problem.t_grid().iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            sig12(t),
            sig12(problem.grid()[k]),
            sig12(result.w[k]),
            sig12(result.el_defect[k])
        ));
    }
    out
}

/// Renders the transition profile as CSV with columns (t, z, dz) at
/// `samples` uniform abscissae covering the saturated layer.
pub fn profile_csv(profile: &TransitionProfile, samples: usize) -> String {
    let b = profile.tau() + 1.0;
    let mut out = String::new();
    out.push_str(&format!(
        "# wulffsweep profile schema 1: tau = {}, c_w = {}\n",
        sig12(profile.tau()),
        sig12(profile.energy())
    ));
    out.push_str("t,z,dz\n");
    let count = samples.max(2);
    for k in 0..count {
        let t = -b + 2.0 * b * k as f64 / (count - 1) as f64;
        out.push_str(&format!(
            "{},{},{}\n",
            sig12(t),
            sig12(profile.eval(t)),
            sig12(profile.slope(t))
        ));
    }
    out
}

/// Renders a rearranged radial profile as CSV with columns (rho, vbar).
pub fn rearranged_csv(profile: &RadialProfile) -> String {
    let mut out = String::new();
    out.push_str("# wulffsweep rearranged profile schema 1\n");
    out.push_str("rho,vbar\n");
    for (rho, value) in profile.radii().iter().zip(profile.values()) {
        out.push_str(&format!("{},{}\n", sig12(*rho), sig12(*value)));
    }
    out
}

/// Writes `text` to `dir/name`, creating the directory if needed.
pub fn write_text(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("cannot create {}: {e}", dir.display()),
        ))
    })?;
    let path = dir.join(name);
    std::fs::write(&path, text).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("cannot write {}: {e}", path.display()),
        ))
    })?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RunConfig;
    use crate::sweep::{SweepReport, SweepRow};

    fn synthetic_report() -> SweepReport {
        let mut config = RunConfig::default();
        config.eps = vec![0.1, 0.05];
        let row = |eps: f64, quotient: f64| SweepRow {
            eps,
            excess: -3.3 * eps,
            lambda: 2.0 + eps,
            eps_lambda: eps * (2.0 + eps),
            delta: -2.5 * eps,
            eps_delta: -2.5 * eps * eps,
            min_w_plus_one: -0.01,
            omega: -7.7 * eps * eps,
            omega_over_eps2: -7.7,
            limsup_quotient: quotient,
            energy_corr: 0.1,
            majorant: 0.1,
            complementarity: 1e-11,
            el_residual: 1e-7,
            iterations: 42,
            converged: true,
        };
        SweepReport {
            config,
            c_w: 2.034387289791364,
            tau_w: 4.102914394613535,
            kappa: std::f64::consts::PI,
            radius: 0.5,
            lambda0: 2.034387289791364,
            rows: vec![row(0.1, f64::NAN), row(0.05, 3.5)],
            complete: true,
        }
    }

    #[test]
    fn renders_twelve_significant_digits() {
        assert_eq!(sig12(2.034387289791364), "2.03438728979e0");
        assert_eq!(sig12(-0.0125), "-1.25000000000e-2");
        assert_eq!(sig12(0.0), "0.00000000000e0");
        assert_eq!(sig12(-0.0), "0.00000000000e0");
        assert_eq!(sig12(f64::NAN), "nan");
        assert_eq!(sig12(f64::INFINITY), "inf");
        assert_eq!(sig12(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn csv_has_the_fixed_schema_and_is_deterministic() {
        let report = synthetic_report();
        let text = sweep_csv(&report);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("# wulffsweep sweep schema 1"));
        assert!(text.contains("# config:"));
        assert!(text.contains("#   [norm]"));
        assert!(
            text.contains("eps,excess,lambda,eps_lambda,delta,eps_delta,min_w_plus_one,omega,omega_over_eps2,limsup_quotient"),
        );
        assert!(text.contains("1.00000000000e-1,-3.30000000000e-1"));
        let nan_row = text
            .lines()
            .find(|line| line.starts_with("1.00000000000e-1"))
            .expect("first data row");
        assert!(nan_row.ends_with(",nan"), "inadmissible quotient renders nan");
        assert_eq!(text, sweep_csv(&report), "rendering is deterministic");
    }

    #[test]
    fn plotdata_emits_one_file_per_column() {
        let report = synthetic_report();
        let files = sweep_plotdata(&report);
        assert_eq!(files.len(), SWEEP_COLUMNS.len() - 1);
        let (name, text) = &files[0];
        assert_eq!(name, "sweep_excess.dat");
        assert!(text.starts_with("# wulffsweep plotdata schema 1: excess vs eps\n"));
        assert!(text.contains("1.00000000000e-1 -3.30000000000e-1\n"));
        let mut empty = synthetic_report();
        empty.rows.clear();
        for (_, text) in sweep_plotdata(&empty) {
            assert_eq!(text.lines().count(), 1, "header-only file for empty report");
        }
    }

    #[test]
    fn files_land_in_the_requested_directory() {
        let dir = std::env::temp_dir().join(format!("wulffsweep-report-{}", std::process::id()));
        let path = write_text(&dir, "probe.csv", "eps\n").expect("write");
        let back = std::fs::read_to_string(&path).expect("read back");
        assert_eq!(back, "eps\n");
        std::fs::remove_dir_all(&dir).expect("cleanup");
    }
}
