use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};

use super::{ActionSeries, Check, Diagnostics, ExperimentConfig, RateTable, Report};

/// Paths written by [`write_outputs`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutputFiles {
    pub actions: PathBuf,
    pub diagnostics: PathBuf,
    pub summary: PathBuf,
    /// The resolved configuration alone, loadable to reproduce the run.
    pub config: PathBuf,
}

#[derive(Serialize)]
struct Summary<'a> {
    config: &'a ExperimentConfig,
    diagnostics: &'a Diagnostics,
    rates: &'a RateTable,
    checks: &'a [Check],
}

fn number(v: f64) -> String {
    format!("{v:.16e}")
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> Error + '_ {
    move |e| Error::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

fn write_table(path: &Path, header: &[String], times: &[f64], columns: &[&[f64]]) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(BufWriter::new(file));
    w.write_record(header).map_err(csv_err(path))?;
    if columns.is_empty() {
        return w.flush().map_err(io_err(path));
    }
    let mut row = Vec::with_capacity(columns.len() + 1);
    for (i, &t) in times.iter().enumerate() {
        row.clear();
        row.push(number(t));
        row.extend(columns.iter().map(|c| number(c[i])));
        w.write_record(&row).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Writes `<name>_actions.csv`, `<name>_diagnostics.csv`,
/// `<name>_summary.toml` and `<name>_config.toml` into `dir`.
///
/// Numbers are written with 17 significant digits, so reading them back
/// gives the same `f64` values; identical reports give identical files.
/// Without tracked actions the actions file holds only its header.
pub fn write_outputs(report: &Report, dir: &Path) -> Result<OutputFiles> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let name = &report.config.name;
    let files = OutputFiles {
        actions: dir.join(format!("{name}_actions.csv")),
        diagnostics: dir.join(format!("{name}_diagnostics.csv")),
        summary: dir.join(format!("{name}_summary.toml")),
        config: dir.join(format!("{name}_config.toml")),
    };

    let mut header = vec!["t".to_string()];
    header.extend(report.actions.iter().map(|a| format!("mode_{}", a.mode)));
    let columns: Vec<&[f64]> = report.actions.iter().map(|a| a.amplitudes.as_slice()).collect();
    write_table(&files.actions, &header, &report.times, &columns)?;

    let mut header = vec!["t".to_string()];
    header.extend(report.series.keys().cloned());
    let columns: Vec<&[f64]> = report.series.values().map(Vec::as_slice).collect();
    write_table(&files.diagnostics, &header, &report.times, &columns)?;

    let summary = Summary {
        config: &report.config,
        diagnostics: &report.diagnostics,
        rates: &report.rates,
        checks: &report.checks,
    };
    let text = toml::to_string(&summary).map_err(|e| Error::Format {
        path: files.summary.clone(),
        message: e.to_string(),
    })?;
    write_text(&files.summary, &text)?;
    write_text(&files.config, &report.config.to_toml())?;
    Ok(files)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = File::create(path).map_err(io_err(path))?;
    f.write_all(text.as_bytes()).map_err(io_err(path))
}

/// Reads an actions CSV back into one series per `mode_<j>` column.
pub fn read_actions_csv(path: &Path) -> Result<Vec<ActionSeries>> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut r = csv::Reader::from_reader(file);
    let header = r.headers().map_err(csv_err(path))?.clone();
    let bad = |message: String| Error::Format {
        path: path.to_path_buf(),
        message,
    };
    if header.get(0) != Some("t") {
        return Err(bad("first column must be t".into()));
    }
    let modes = header
        .iter()
        .skip(1)
        .map(|h| {
            h.strip_prefix("mode_")
                .and_then(|j| j.parse::<i64>().ok())
                .ok_or_else(|| bad(format!("unexpected column {h:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut times = Vec::new();
    let mut amps = vec![Vec::new(); modes.len()];
    for rec in r.records() {
        let rec = rec.map_err(csv_err(path))?;
        let parse = |s: &str| s.parse::<f64>().map_err(|e| bad(format!("{s:?}: {e}")));
        times.push(parse(&rec[0])?);
        for (col, a) in amps.iter_mut().enumerate() {
            a.push(parse(&rec[col + 1])?);
        }
    }
    modes
        .into_iter()
        .zip(amps)
        .map(|(j, a)| ActionSeries::new(j, times.clone(), a))
        .collect()
}
