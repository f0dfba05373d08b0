//! Run artefacts: CSV log, gnuplot scripts, SVG plots and the manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use vq_core::sim::SimLog;

use crate::svg;
use crate::CliError;

/// A plot family: title, y-axis label and the plotted columns.
pub struct PlotSpec {
    pub name: &'static str,
    pub title: &'static str,
    pub ylabel: &'static str,
    pub columns: &'static [&'static str],
}

pub const PLOTS: [PlotSpec; 6] = [
    PlotSpec { name: "position", title: "Position", ylabel: "m", columns: &["x", "y", "z", "x_ref", "y_ref", "z_ref"] },
    PlotSpec { name: "velocity", title: "Velocity", ylabel: "m/s", columns: &["vx", "vy", "vz"] },
    PlotSpec { name: "thrusts", title: "Motor thrusts", ylabel: "N", columns: &["f1", "f2", "f3", "f4"] },
    PlotSpec { name: "attitude", title: "Roll, pitch, yaw", ylabel: "rad", columns: &["roll", "pitch", "yaw"] },
    PlotSpec { name: "body_rates", title: "Body rates", ylabel: "rad/s", columns: &["p", "q", "r"] },
    PlotSpec { name: "gamma", title: "Moment-to-thrust ratio", ylabel: "m", columns: &["gamma1", "gamma2", "gamma3", "gamma4"] },
];

pub const ESTIMATOR_PLOT: PlotSpec = PlotSpec {
    name: "estimator",
    title: "Altitude: true, measured, estimated",
    ylabel: "m",
    columns: &["z", "z_meas", "z_hat"],
};

pub const LOG_FILE: &str = "log.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

pub fn format_value(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

pub fn write_csv(path: &Path, log: &SimLog) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_path(path)
        .map_err(|e| io_err(path, e))?;
    w.write_record(SimLog::COLUMNS).map_err(|e| io_err(path, e))?;
    for row in &log.rows {
        w.write_record(row.fields().iter().map(|v| format_value(*v)))
            .map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

fn column_index(name: &str) -> usize {
    SimLog::COLUMNS
        .iter()
        .position(|c| *c == name)
        .expect("plot columns exist in the log schema")
}

/// Gnuplot script reading `log.csv` from the script's own directory.
pub fn gnuplot_script(spec: &PlotSpec) -> String {
    let mut s = String::new();
    s.push_str("# Run from this directory: gnuplot ");
    s.push_str(spec.name);
    s.push_str(".gp\n");
    s.push_str("set datafile separator ','\n");
    s.push_str("set terminal pngcairo size 900,560\n");
    s.push_str(&format!("set output '{}.png'\n", spec.name));
    s.push_str(&format!("set title '{}'\n", spec.title));
    s.push_str("set xlabel 't (s)'\n");
    s.push_str(&format!("set ylabel '{}'\n", spec.ylabel));
    s.push_str("set grid\nset key outside right\n");
    let series: Vec<String> = spec
        .columns
        .iter()
        .map(|c| format!("'{LOG_FILE}' using 1:{} skip 1 with lines title '{c}'", column_index(c) + 1))
        .collect();
    s.push_str("plot ");
    s.push_str(&series.join(", \\\n     "));
    s.push('\n');
    s
}

pub fn plot_specs(log: &SimLog) -> Vec<&'static PlotSpec> {
    let mut specs: Vec<&PlotSpec> = PLOTS.iter().collect();
    if log.rows.iter().any(|r| r.estimator.is_some()) {
        specs.push(&ESTIMATOR_PLOT);
    }
    specs
}

pub fn write_plots(dir: &Path, log: &SimLog, with_svg: bool) -> Result<Vec<String>, CliError> {
    let mut files = Vec::new();
    for spec in plot_specs(log) {
        let name = format!("{}.gp", spec.name);
        let path = dir.join(&name);
        fs::write(&path, gnuplot_script(spec)).map_err(|e| io_err(&path, e))?;
        files.push(name);
        if with_svg {
            let name = format!("{}.svg", spec.name);
            let path = dir.join(&name);
            let t: Vec<f64> = log.rows.iter().map(|r| r.t).collect();
            let series: Vec<(&str, Vec<Option<f64>>)> = spec
                .columns
                .iter()
                .map(|c| {
                    let i = column_index(c);
                    (*c, log.rows.iter().map(|r| r.fields()[i]).collect())
                })
                .collect();
            fs::write(&path, svg::line_plot(spec.title, spec.ylabel, &t, &series)).map_err(|e| io_err(&path, e))?;
            files.push(name);
        }
    }
    Ok(files)
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub config_path: PathBuf,
    /// SHA-256 of the resolved configuration, hex.
    pub config_hash: String,
    pub seed: u64,
    pub scenario: String,
    pub output_dir: PathBuf,
    pub files: Vec<String>,
    pub end_time_s: f64,
    pub stop_reason: String,
    pub warnings: Vec<String>,
    pub wall_clock_s: f64,
}

pub fn config_hash(canonical: &str) -> String {
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

pub fn write_manifest(dir: &Path, manifest: &RunManifest) -> Result<(), CliError> {
    let path = dir.join(MANIFEST_FILE);
    let text = serde_json::to_string_pretty(manifest).expect("manifest serialises");
    fs::write(&path, text + "\n").map_err(|e| io_err(&path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_fields_and_round_trip_text() {
        assert_eq!(format_value(None), "");
        assert_eq!(format_value(Some(0.1)), "0.1");
        let x = 1.0 / 3.0;
        assert_eq!(format_value(Some(x)).parse::<f64>().unwrap(), x);
        assert_eq!(format_value(Some(-2.5e-20)).parse::<f64>().unwrap(), -2.5e-20);
    }

    #[test]
    fn scripts_only_reference_the_local_log() {
        for spec in PLOTS.iter().chain([&ESTIMATOR_PLOT]) {
            let s = gnuplot_script(spec);
            assert!(s.contains("'log.csv' using 1:"));
            let quoted: Vec<&str> = s.split('\'').skip(1).step_by(2).collect();
            let files: Vec<&&str> = quoted.iter().filter(|q| q.contains('.') && !q.contains(' ')).collect();
            assert!(files.iter().all(|f| !f.contains('/') && !f.contains('\\')), "{files:?}");
        }
    }

    #[test]
    fn hash_is_stable() {
        assert_eq!(config_hash("{}"), config_hash("{}"));
        assert_ne!(config_hash("{}"), config_hash("{ }"));
        assert_eq!(config_hash("").len(), 64);
    }
}
