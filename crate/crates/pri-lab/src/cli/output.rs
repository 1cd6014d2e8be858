use std::io::Write;

use serde::Serialize;

use crate::apps::GameReport;
use crate::error::{LabError, Result};
use crate::verify::{ExperimentReport, SweepReport};

use super::args::Format;
use super::manifest::game_name;

/// Result of one manifest command.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Outcome {
    Point(ExperimentReport),
    Sweep(SweepReport),
    Game(GameReport),
}

impl Outcome {
    pub fn passed(&self) -> bool {
        match self {
            Outcome::Point(r) => r.passed(),
            Outcome::Sweep(r) => r.passed(),
            Outcome::Game(r) => r.passed(),
        }
    }

    pub fn strip_timing(self, keep: bool) -> Self {
        if keep {
            return self;
        }
        match self {
            Outcome::Point(r) => Outcome::Point(r.without_timing()),
            Outcome::Sweep(r) => Outcome::Sweep(r.without_timing()),
            Outcome::Game(r) => Outcome::Game(r.without_timing()),
        }
    }

    fn rows(&self) -> Vec<CsvRow> {
        match self {
            Outcome::Point(r) => vec![CsvRow::point(r, "")],
            Outcome::Sweep(s) => {
                let param = s.param.iter().map(|p| {
                    serde_json::to_value(p)
                        .unwrap()
                        .as_str()
                        .unwrap_or("")
                        .to_string()
                });
                let param = param.collect::<Vec<_>>().join(",");
                s.points.iter().map(|r| CsvRow::point(r, &param)).collect()
            }
            Outcome::Game(g) => vec![CsvRow::game(g)],
        }
    }
}

/// One CSV line per experiment point or game.
#[derive(Serialize)]
struct CsvRow {
    kind: &'static str,
    name: String,
    sweep: String,
    n: usize,
    m: usize,
    s: usize,
    t: usize,
    q: usize,
    p: u64,
    samples: usize,
    seed: u64,
    measured: f64,
    stderr: f64,
    bound_expr: String,
    bound_value: f64,
    #[serde(rename = "fitted_C")]
    fitted_c: Option<f64>,
    verdict: &'static str,
    runtime_ms: u64,
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "fail"
    }
}

impl CsvRow {
    fn point(r: &ExperimentReport, sweep: &str) -> Self {
        let c = &r.config;
        CsvRow {
            kind: "verify",
            name: r.name.to_string(),
            sweep: sweep.to_string(),
            n: c.n,
            m: c.m,
            s: c.s,
            t: c.t,
            q: c.q,
            p: c.p,
            samples: r.samples,
            seed: r.seed,
            measured: r.measured,
            stderr: r.stderr,
            bound_expr: r.bound_expr.clone(),
            bound_value: r.bound_value,
            fitted_c: r.fitted_c,
            verdict: verdict(r.passed()),
            runtime_ms: r.runtime_ms,
        }
    }

    /// `measured` is the win rate and `stderr` the Wilson half-width over 1.96.
    fn game(g: &GameReport) -> Self {
        let d = &g.game;
        CsvRow {
            kind: "game",
            name: game_name(d.variant).to_string(),
            sweep: String::new(),
            n: d.n,
            m: d.m,
            s: 1,
            t: d.t,
            q: d.q,
            p: d.p,
            samples: g.trials,
            seed: g.seed,
            measured: g.win_rate,
            stderr: (g.ci_high - g.ci_low) / (2.0 * 1.96),
            bound_expr: "reference".into(),
            bound_value: g.reference_bound,
            fitted_c: None,
            verdict: verdict(g.passed()),
            runtime_ms: g.runtime_ms,
        }
    }
}

/// Serializes outcomes: a lone outcome as an object when `single`, an
/// array otherwise; CSV always has one header and one row per point.
pub fn render(outcomes: &[Outcome], single: bool, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => {
            let mut s = if single && outcomes.len() == 1 {
                serde_json::to_string_pretty(&outcomes[0])?
            } else {
                serde_json::to_string_pretty(outcomes)?
            };
            s.push('\n');
            Ok(s.into_bytes())
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in outcomes.iter().flat_map(Outcome::rows) {
                w.serialize(row)
                    .map_err(|e| LabError::Invalid(format!("csv: {e}")))?;
            }
            w.into_inner()
                .map_err(|e| LabError::Invalid(format!("csv: {e}")))
        }
    }
}

pub fn emit(bytes: &[u8], out: Option<&std::path::Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, bytes)?,
        None => std::io::stdout().lock().write_all(bytes)?,
    }
    Ok(())
}

/// Human-readable suite table for stderr.
pub fn summary_table(outcomes: &[Outcome]) -> String {
    let mut s = format!(
        "{:<18} {:>6} {:>12} {:>12} {:>8}\n",
        "experiment", "points", "max meas.", "max bound", "verdict"
    );
    for o in outcomes {
        let (name, points): (String, Vec<&ExperimentReport>) = match o {
            Outcome::Point(r) => (r.name.to_string(), vec![r]),
            Outcome::Sweep(sw) => {
                let param = o
                    .rows()
                    .first()
                    .map(|r| r.sweep.clone())
                    .unwrap_or_default();
                (format!("{} ({param})", sw.name), sw.points.iter().collect())
            }
            Outcome::Game(g) => {
                s += &format!(
                    "{:<18} {:>6} {:>12.4e} {:>12.4e} {:>8}\n",
                    game_name(g.game.variant),
                    g.trials,
                    g.win_rate,
                    g.reference_bound,
                    verdict(g.passed())
                );
                continue;
            }
        };
        let meas = points.iter().map(|r| r.measured).fold(0.0, f64::max);
        let bound = points.iter().map(|r| r.bound_value).fold(0.0, f64::max);
        s += &format!(
            "{:<18} {:>6} {:>12.4e} {:>12.4e} {:>8}\n",
            name,
            points.len(),
            meas,
            bound,
            verdict(o.passed())
        );
    }
    s
}
