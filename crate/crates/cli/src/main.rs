//! `hessgeom`: list presets, run check suites, evaluate tensors and export
//! geometry configs.
//!
//! Exit codes: 0 when every checked entry passes, 1 when a check fails, 2 on
//! usage, configuration or domain errors.

use clap::{Parser, Subcommand, ValueEnum};
use hessgeom::cones::ConeMetric;
use hessgeom::suites::{self, evaluate, load_geometry, run_suite, RunOptions, Suite};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "hessgeom", version, about = "Verify Hessian, Kähler and hyper-Kähler lift identities numerically")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List presets (or suites with --suites).
    List {
        #[arg(long)]
        suites: bool,
        #[arg(long)]
        json: bool,
    },
    /// Run a check suite on a preset or a JSON config.
    Check {
        geometry: String,
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Tolerance override `<check_id>=<float>`; repeatable.
        #[arg(long = "tol", value_name = "ID=VALUE")]
        tol: Vec<String>,
        /// Recompute every residual with finite differences and compare.
        #[arg(long)]
        fd_check: bool,
        /// Write the JSON report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the JSON report instead of the text table.
        #[arg(long)]
        json: bool,
    },
    /// Print a tensor at a point with 12 significant digits.
    Eval {
        geometry: String,
        /// g|gcan|gcon|gr|omega|omega_ck|I|gc|I1|I2|I3|g_chk
        tensor: String,
        /// Comma-separated coordinates; bundle tensors accept a base point
        /// (zero fiber) or a full bundle point.
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        /// Cone metric used by g, gr and omega.
        #[arg(long, value_enum, default_value_t = MetricArg::Gcan)]
        metric: MetricArg,
        #[arg(long)]
        json: bool,
    },
    /// Print (or write) a JSON config that rebuilds the geometry.
    Export {
        geometry: String,
        #[arg(long, value_enum, default_value_t = MetricArg::Gcon)]
        metric: MetricArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Gcan,
    Gcon,
}

impl From<MetricArg> for ConeMetric {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Gcan => ConeMetric::Canonical,
            MetricArg::Gcon => ConeMetric::Characteristic,
        }
    }
}

/// A failure that maps to exit code 2.
#[derive(Debug)]
struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<bool, UsageError> {
    match command {
        Command::List { suites, json } => {
            let (key, items) = if suites {
                ("suites", suites::SUITES.to_vec())
            } else {
                ("presets", suites::presets())
            };
            if json {
                println!("{}", serde_json::json!({ key: items }));
            } else {
                for item in items {
                    println!("{item}");
                }
            }
            Ok(true)
        }
        Command::Check { geometry, suite, samples, seed, tol, fd_check, out, json } => {
            let suite: Suite = suite.parse()?;
            let tolerances = parse_tolerances(&tol)?;
            let g = load_geometry(&geometry)?;
            let report = run_suite(&g, &RunOptions { suite, samples, seed, tolerances, fd_check })?;
            if let Some(path) = out {
                std::fs::write(&path, report.to_json() + "\n")
                    .map_err(|e| UsageError(format!("cannot write {}: {e}", path.display())))?;
            }
            if json {
                println!("{}", report.to_json());
            } else {
                print!("{}", report.to_text());
            }
            Ok(report.passed())
        }
        Command::Eval { geometry, tensor, at, metric, json } => {
            let point = parse_point(&at)?;
            let g = load_geometry(&geometry)?;
            let m = evaluate(&g, &tensor, &point, metric.into())?;
            if json {
                let rows: Vec<Vec<f64>> = m.row_iter().map(|r| r.iter().copied().collect()).collect();
                println!("{}", serde_json::json!(rows));
            } else {
                print!("{}", format_matrix(&m));
            }
            Ok(true)
        }
        Command::Export { geometry, metric, out } => {
            let g = load_geometry(&geometry)?;
            let text = serde_json::to_string_pretty(&g.to_config_json(metric.into()))? + "\n";
            match out {
                Some(path) => std::fs::write(&path, text)
                    .map_err(|e| UsageError(format!("cannot write {}: {e}", path.display())))?,
                None => print!("{text}"),
            }
            Ok(true)
        }
    }
}

fn parse_tolerances(items: &[String]) -> Result<BTreeMap<String, f64>, UsageError> {
    items
        .iter()
        .map(|item| {
            let (id, value) = item
                .split_once('=')
                .ok_or_else(|| UsageError(format!("tolerance `{item}` is not of the form <check_id>=<float>")))?;
            let v: f64 = value
                .trim()
                .parse()
                .map_err(|_| UsageError(format!("tolerance `{item}` has an invalid value")))?;
            if !(v > 0.0) {
                return Err(UsageError(format!("tolerance `{item}` must be positive")));
            }
            Ok((id.trim().to_string(), v))
        })
        .collect()
}

fn parse_point(text: &str) -> Result<Vec<f64>, UsageError> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| UsageError(format!("invalid coordinate `{s}` in `{text}`"))))
        .collect()
}

/// `v` with 12 significant digits, trailing zeros removed.
fn format_significant(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let exponent = v.abs().log10().floor() as i32;
    let trim = |s: String| {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    };
    if (-5..12).contains(&exponent) {
        let decimals = (11 - exponent).max(0) as usize;
        let s = trim(format!("{v:.decimals$}"));
        if s == "-0" {
            "0".to_string()
        } else {
            s
        }
    } else {
        let s = format!("{v:.11e}");
        let (mantissa, exp) = s.split_once('e').expect("scientific format has an exponent");
        format!("{}e{exp}", trim(mantissa.to_string()))
    }
}

fn format_matrix(m: &nalgebra::DMatrix<f64>) -> String {
    let cells: Vec<Vec<String>> = m.row_iter().map(|r| r.iter().map(|&v| format_significant(v)).collect()).collect();
    let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
    let mut out = String::new();
    for row in cells {
        let line: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
        out.push_str(&line.join("  "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_significant(1.0), "1");
        assert_eq!(format_significant(0.0), "0");
        assert_eq!(format_significant(-2.5), "-2.5");
        assert_eq!(format_significant(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_significant(2.0 / 3.0 * 1e3), "666.666666667");
        assert_eq!(format_significant(1.5e-9), "1.5e-9");
        assert_eq!(format_significant(1e-17), "1e-17");
    }

    #[test]
    fn tolerance_parsing() {
        let t = parse_tolerances(&["cone.radiant=1e-6".into()]).unwrap();
        assert_eq!(t["cone.radiant"], 1e-6);
        assert!(parse_tolerances(&["cone.radiant".into()]).is_err());
        assert!(parse_tolerances(&["a=-1".into()]).is_err());
        assert!(parse_tolerances(&["a=x".into()]).is_err());
    }
}
