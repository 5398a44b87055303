//! CSV and JSON reports of benchmark records.
//!
//! Floats are written as `{:.16e}` (17 significant digits). Missing optional
//! values are an empty CSV cell or JSON `null`.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::bench::{BenchmarkRecord, OutputFormat};
use crate::error::{LogDetError, Result};

/// Column order of the CSV header and JSON keys.
pub const COLUMNS: [&str; 14] = [
    "name",
    "n",
    "nnz",
    "m",
    "p",
    "t",
    "seed",
    "estimate_mean",
    "estimate_std",
    "exact_value",
    "rel_err_pct",
    "time_approx_s",
    "time_exact_s",
    "speedup",
];

pub fn emit_report(
    records: &[BenchmarkRecord],
    format: OutputFormat,
    path: impl AsRef<Path>,
) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_report(records, format, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn write_report(
    records: &[BenchmarkRecord],
    format: OutputFormat,
    out: &mut impl Write,
) -> Result<()> {
    if records.is_empty() {
        return Err(LogDetError::Report("no records to write".into()));
    }
    match format {
        OutputFormat::Csv => write_csv(records, out),
        OutputFormat::Json => write_json(records, out),
    }
}

pub fn read_report(format: OutputFormat, input: impl Read) -> Result<Vec<BenchmarkRecord>> {
    match format {
        OutputFormat::Csv => read_csv(input),
        OutputFormat::Json => {
            serde_json::from_reader(input).map_err(|e| LogDetError::Report(e.to_string()))
        }
    }
}

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn cells(r: &BenchmarkRecord) -> [Option<String>; 14] {
    let opt = |x: Option<f64>| x.map(float);
    [
        Some(r.name.clone()),
        Some(r.n.to_string()),
        Some(r.nnz.to_string()),
        Some(r.m.to_string()),
        Some(r.p.to_string()),
        Some(r.t.to_string()),
        Some(r.seed.to_string()),
        Some(float(r.estimate_mean)),
        Some(float(r.estimate_std)),
        opt(r.exact_value),
        opt(r.rel_err_pct),
        Some(float(r.time_approx_s)),
        opt(r.time_exact_s),
        opt(r.speedup),
    ]
}

fn write_csv(records: &[BenchmarkRecord], out: &mut impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| LogDetError::Report(e.to_string());
    w.write_record(COLUMNS).map_err(csv_err)?;
    for r in records {
        w.write_record(cells(r).iter().map(|c| c.as_deref().unwrap_or("")))
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn write_json(records: &[BenchmarkRecord], out: &mut impl Write) -> Result<()> {
    writeln!(out, "[")?;
    for (i, r) in records.iter().enumerate() {
        let floats = [r.estimate_mean, r.estimate_std, r.time_approx_s];
        let optional = [r.exact_value, r.rel_err_pct, r.time_exact_s, r.speedup];
        if floats
            .iter()
            .chain(optional.iter().flatten())
            .any(|x| !x.is_finite())
        {
            return Err(LogDetError::Report(format!(
                "record {i} has a non-finite value"
            )));
        }
        let name =
            serde_json::to_string(&r.name).map_err(|e| LogDetError::Report(e.to_string()))?;
        let body: Vec<String> = COLUMNS
            .iter()
            .zip(cells(r))
            .enumerate()
            .map(|(k, (key, cell))| {
                let value = if k == 0 {
                    name.clone()
                } else {
                    cell.unwrap_or_else(|| "null".into())
                };
                format!("\"{key}\": {value}")
            })
            .collect();
        let sep = if i + 1 < records.len() { "," } else { "" };
        writeln!(out, "  {{{}}}{sep}", body.join(", "))?;
    }
    writeln!(out, "]")?;
    Ok(())
}

fn read_csv(input: impl Read) -> Result<Vec<BenchmarkRecord>> {
    let mut reader = csv::Reader::from_reader(input);
    let header = reader
        .headers()
        .map_err(|e| LogDetError::Report(e.to_string()))?
        .clone();
    if header.iter().ne(COLUMNS.iter().copied()) {
        return Err(LogDetError::Report(format!(
            "unexpected header: {header:?}"
        )));
    }
    let mut records = Vec::new();
    for (line, row) in reader.records().enumerate() {
        let row = row.map_err(|e| LogDetError::Report(e.to_string()))?;
        let bad = |col: &str| LogDetError::Report(format!("row {}: bad `{col}`", line + 1));
        let field = |k: usize| row.get(k).unwrap_or("");
        let int = |k: usize| field(k).parse::<usize>().map_err(|_| bad(COLUMNS[k]));
        let real = |k: usize| field(k).parse::<f64>().map_err(|_| bad(COLUMNS[k]));
        let opt = |k: usize| match field(k) {
            "" => Ok(None),
            s => s.parse::<f64>().map(Some).map_err(|_| bad(COLUMNS[k])),
        };
        records.push(BenchmarkRecord {
            name: field(0).to_string(),
            n: int(1)?,
            nnz: int(2)?,
            m: int(3)?,
            p: int(4)?,
            t: int(5)?,
            seed: field(6).parse().map_err(|_| bad("seed"))?,
            estimate_mean: real(7)?,
            estimate_std: real(8)?,
            exact_value: opt(9)?,
            rel_err_pct: opt(10)?,
            time_approx_s: real(11)?,
            time_exact_s: opt(12)?,
            speedup: opt(13)?,
        });
    }
    Ok(records)
}
