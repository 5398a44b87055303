//! Matrix Market exchange format.
//!
//! Reads `matrix coordinate|array real|double|integer symmetric` files and
//! writes `matrix coordinate real symmetric`, lower triangle, 1-based.
//! Header keywords are matched case-insensitively.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::SpdMatrix;
use crate::error::{LogDetError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    Coordinate,
    Array,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Header {
    pub layout: Layout,
    pub field: String,
    pub symmetry: String,
}

/// Raw contents of a symmetric Matrix Market file before the SPD checks run.
#[derive(Debug, Clone)]
pub struct MarketData {
    pub header: Header,
    pub n: usize,
    /// 0-based `(row, col, value)` entries exactly as stored (one triangle).
    pub entries: Vec<(usize, usize, f64)>,
}

pub fn load_matrix_market(path: impl AsRef<Path>) -> Result<SpdMatrix> {
    let data = read_matrix_market(path)?;
    SpdMatrix::from_triangle(data.n, &data.entries)
}

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<MarketData> {
    let path = path.as_ref();
    let file = File::open(path)?;
    parse_matrix_market(BufReader::new(file), path)
}

/// Parses from any reader; `origin` only labels error messages.
pub fn parse_matrix_market(reader: impl BufRead, origin: &Path) -> Result<MarketData> {
    let fail = |line: usize, message: String| LogDetError::Format {
        path: origin.to_path_buf(),
        line,
        message,
    };
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (hline, header_text) = match lines.next() {
        Some((no, text)) => (no, text?),
        None => return Err(fail(1, "empty file".into())),
    };
    let header = parse_header(&header_text).map_err(|m| fail(hline, m))?;

    // Skip comments and blank lines up to the size line.
    let mut size = None;
    for (no, text) in lines.by_ref() {
        let text = text?;
        let t = text.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        size = Some((no, t.to_string()));
        break;
    }
    let (sline, size_text) = size.ok_or_else(|| fail(hline, "missing size line".into()))?;
    let dims: Vec<usize> = size_text
        .split_whitespace()
        .map(|tok| {
            tok.parse::<usize>()
                .map_err(|_| fail(sline, format!("bad size token `{tok}`")))
        })
        .collect::<Result<_>>()?;
    let expected_dims = match header.layout {
        Layout::Coordinate => 3,
        Layout::Array => 2,
    };
    if dims.len() != expected_dims {
        return Err(fail(
            sline,
            format!(
                "size line needs {expected_dims} integers, found {}",
                dims.len()
            ),
        ));
    }
    let (rows, cols) = (dims[0], dims[1]);
    if rows != cols {
        return Err(fail(
            sline,
            format!("symmetric matrix must be square, got {rows}x{cols}"),
        ));
    }
    if rows == 0 {
        return Err(fail(sline, "matrix order must be positive".into()));
    }
    let n = rows;
    let count = match header.layout {
        Layout::Coordinate => dims[2],
        Layout::Array => n * (n + 1) / 2,
    };

    let mut entries = Vec::with_capacity(count);
    let mut last_line = sline;
    for (no, text) in lines {
        let text = text?;
        let t = text.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        last_line = no;
        if entries.len() == count {
            return Err(fail(no, format!("more than the declared {count} entries")));
        }
        let toks: Vec<&str> = t.split_whitespace().collect();
        let value_of = |tok: &str| -> Result<f64> {
            let v: f64 = tok
                .parse()
                .map_err(|_| fail(no, format!("bad value `{tok}`")))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(fail(no, format!("non-finite value `{tok}`")))
            }
        };
        match header.layout {
            Layout::Coordinate => {
                if toks.len() != 3 {
                    return Err(fail(no, format!("expected `row col value`, found `{t}`")));
                }
                let index = |tok: &str| -> Result<usize> {
                    let i: usize = tok
                        .parse()
                        .map_err(|_| fail(no, format!("bad index `{tok}`")))?;
                    if i == 0 || i > n {
                        return Err(fail(no, format!("index {i} outside 1..={n}")));
                    }
                    Ok(i - 1)
                };
                entries.push((index(toks[0])?, index(toks[1])?, value_of(toks[2])?));
            }
            Layout::Array => {
                if toks.len() != 1 {
                    return Err(fail(no, format!("expected a single value, found `{t}`")));
                }
                // Column-major lower triangle.
                let k = entries.len();
                let (i, j) = array_position(n, k);
                entries.push((i, j, value_of(toks[0])?));
            }
        }
    }
    if entries.len() != count {
        return Err(fail(
            last_line,
            format!("declared {count} entries, found {}", entries.len()),
        ));
    }
    Ok(MarketData { header, n, entries })
}

/// Position of the `k`-th value of a column-major packed lower triangle.
fn array_position(n: usize, mut k: usize) -> (usize, usize) {
    let mut j = 0;
    while k >= n - j {
        k -= n - j;
        j += 1;
    }
    (j + k, j)
}

fn parse_header(text: &str) -> std::result::Result<Header, String> {
    let toks: Vec<String> = text
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    if toks.first().map(String::as_str) != Some("%%matrixmarket") {
        return Err("first line must start with %%MatrixMarket".into());
    }
    if toks.len() != 5 {
        return Err(format!(
            "header needs 4 keywords after %%MatrixMarket, found {}",
            toks.len() - 1
        ));
    }
    if toks[1] != "matrix" {
        return Err(format!("unsupported object `{}`", toks[1]));
    }
    let layout = match toks[2].as_str() {
        "coordinate" => Layout::Coordinate,
        "array" => Layout::Array,
        other => return Err(format!("unsupported format `{other}`")),
    };
    match toks[3].as_str() {
        "real" | "double" | "integer" => {}
        other => {
            return Err(format!(
                "unsupported field `{other}`; only real data is accepted"
            ))
        }
    }
    if toks[4] != "symmetric" {
        return Err(format!(
            "unsupported symmetry `{}`; only symmetric matrices are accepted",
            toks[4]
        ));
    }
    Ok(Header {
        layout,
        field: toks[3].clone(),
        symmetry: toks[4].clone(),
    })
}

/// Writes the lower triangle in coordinate format. Values use the shortest
/// representation that parses back to the identical `f64`.
pub fn save_matrix_market(a: &SpdMatrix, path: impl AsRef<Path>) -> Result<()> {
    let file = File::create(path.as_ref())?;
    let mut out = BufWriter::new(file);
    write_matrix_market(a, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn write_matrix_market(a: &SpdMatrix, out: &mut impl Write) -> Result<()> {
    let lower = a.lower_triangle();
    writeln!(out, "%%MatrixMarket matrix coordinate real symmetric")?;
    writeln!(out, "{} {} {}", a.n(), a.n(), lower.len())?;
    for (i, j, v) in lower {
        writeln!(out, "{} {} {}", i + 1, j + 1, v)?;
    }
    Ok(())
}
