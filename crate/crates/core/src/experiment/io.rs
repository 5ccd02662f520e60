//! Readers and writers for every file an experiment emits.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::report::{CompareRow, SweepParam, SweepRow};
use crate::error::{Error, Result};
use crate::state::DiscreteState;

pub(crate) fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io(std::io::Error::new(
        e.kind(),
        format!("{}: {e}", path.display()),
    ))
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    Error::Parse(format!("{}: {e}", path.display()))
}

pub(crate) fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    fs::write(path, contents).map_err(|e| io_err(path, e))
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| io_err(path, e))
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut s = serde_json::to_vec_pretty(value).expect("reports serialize");
    s.push(b'\n');
    write_file(path, &s)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = read_file(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// One state per line, each a JSON array of coordinate values.
pub fn write_chain_jsonl(samples: &[DiscreteState], path: &Path) -> Result<()> {
    let mut body = Vec::new();
    for s in samples {
        serde_json::to_writer(&mut body, s.values()).expect("states serialize");
        body.push(b'\n');
    }
    write_file(path, &body)
}

pub fn read_chain_jsonl(path: &Path) -> Result<Vec<DiscreteState>> {
    read_file(path)?
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, l)| {
            serde_json::from_str::<Vec<f64>>(l)
                .map(DiscreteState::new)
                .map_err(|e| Error::Parse(format!("{}:{}: {e}", path.display(), n + 1)))
        })
        .collect()
}

fn csv_bytes<F>(fill: F) -> Vec<u8>
where
    F: FnOnce(&mut csv::Writer<&mut Vec<u8>>) -> csv::Result<()>,
{
    let mut buf = Vec::new();
    {
        let mut w = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(&mut buf);
        fill(&mut w).expect("in-memory csv");
        w.flush().expect("in-memory csv");
    }
    buf
}

pub const COMPARE_HEADER: [&str; 12] = [
    "sampler",
    "alpha",
    "alpha_a",
    "eta",
    "acceptance_rate",
    "tv",
    "eigen_std",
    "eigen_iqr",
    "pmc_mean",
    "pmc_std",
    "rmse_mean",
    "rmse_std",
];

/// Missing metrics are written as empty cells.
pub fn write_compare_csv(rows: &[CompareRow], path: &Path) -> Result<()> {
    let body = csv_bytes(|w| {
        w.write_record(COMPARE_HEADER)?;
        rows.iter().try_for_each(|r| w.serialize(r))
    });
    write_file(path, &body)
}

pub fn read_compare_csv(path: &Path) -> Result<Vec<CompareRow>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    let header = r.headers().map_err(|e| csv_err(path, e))?.clone();
    if header.iter().ne(COMPARE_HEADER) {
        return Err(Error::Parse(format!(
            "{}: unexpected header {:?}",
            path.display(),
            header
        )));
    }
    r.deserialize()
        .collect::<csv::Result<Vec<_>>>()
        .map_err(|e| csv_err(path, e))
}

fn sweep_header(param: SweepParam) -> [&'static str; 5] {
    [
        param.name(),
        "coupling_norm",
        "validation_metric",
        "acceptance_rate",
        "mean_accept_prob",
    ]
}

/// The first column is named after the swept parameter.
pub fn write_sweep_csv(param: SweepParam, rows: &[SweepRow], path: &Path) -> Result<()> {
    let body = csv_bytes(|w| {
        w.write_record(sweep_header(param))?;
        rows.iter().try_for_each(|r| w.serialize(r))
    });
    write_file(path, &body)
}

pub fn read_sweep_csv(path: &Path) -> Result<(SweepParam, Vec<SweepRow>)> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    let header = r.headers().map_err(|e| csv_err(path, e))?.clone();
    let param: SweepParam = header.get(0).unwrap_or_default().parse()?;
    if header.iter().ne(sweep_header(param)) {
        return Err(Error::Parse(format!(
            "{}: unexpected header {:?}",
            path.display(),
            header
        )));
    }
    let rows = r
        .records()
        .map(|rec| rec.and_then(|rec| rec.deserialize(None)))
        .collect::<csv::Result<Vec<SweepRow>>>()
        .map_err(|e| csv_err(path, e))?;
    Ok((param, rows))
}

#[derive(Serialize, Deserialize)]
struct EigenRow {
    eigenvalue: f64,
}

pub fn write_eigenvalues_csv(eigenvalues: &[f64], path: &Path) -> Result<()> {
    let body = csv_bytes(|w| {
        w.write_record(["eigenvalue"])?;
        eigenvalues
            .iter()
            .try_for_each(|&eigenvalue| w.serialize(EigenRow { eigenvalue }))
    });
    write_file(path, &body)
}

pub fn read_eigenvalues_csv(path: &Path) -> Result<Vec<f64>> {
    csv::Reader::from_path(path)
        .and_then(|mut r| {
            r.deserialize()
                .map(|row: csv::Result<EigenRow>| row.map(|e| e.eigenvalue))
                .collect()
        })
        .map_err(|e| csv_err(path, e))
}

#[derive(Serialize, Deserialize)]
struct RouteRow {
    /// City indices joined by `-`.
    route: String,
    cost: f64,
}

pub fn write_routes_csv(routes: &[(Vec<usize>, f64)], path: &Path) -> Result<()> {
    let body = csv_bytes(|w| {
        w.write_record(["route", "cost"])?;
        routes.iter().try_for_each(|(r, cost)| {
            let route: Vec<String> = r.iter().map(|v| v.to_string()).collect();
            w.serialize(RouteRow {
                route: route.join("-"),
                cost: *cost,
            })
        })
    });
    write_file(path, &body)
}

pub fn read_routes_csv(path: &Path) -> Result<Vec<(Vec<usize>, f64)>> {
    let rows: Vec<RouteRow> = csv::Reader::from_path(path)
        .and_then(|mut r| r.deserialize().collect())
        .map_err(|e| csv_err(path, e))?;
    rows.into_iter()
        .map(|row| {
            let route = row
                .route
                .split('-')
                .map(|c| c.parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| {
                    Error::Parse(format!(
                        "{}: bad route '{}': {e}",
                        path.display(),
                        row.route
                    ))
                })?;
            Ok((route, row.cost))
        })
        .collect()
}
