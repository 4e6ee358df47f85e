//! Text formats: edge lists, covariate CSV, label files and matrix dumps.
//!
//! All node indices are 0-based.

use std::fs;
use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::{CovariateMatrix, Graph, LabelVector};

/// Result of reading an edge list, with counts of what was discarded.
#[derive(Debug, Clone)]
pub struct EdgeListLoad {
    pub graph: Graph,
    pub self_loops_dropped: usize,
    pub duplicates_collapsed: usize,
}

pub fn load_edge_list(path: impl AsRef<Path>, n_hint: Option<usize>) -> Result<EdgeListLoad> {
    let text = fs::read_to_string(path)?;
    parse_edge_list(&text, n_hint)
}

/// Parses whitespace- or comma-separated integer pairs, one per line.
/// Blank lines and lines starting with `#` are skipped.
pub fn parse_edge_list(text: &str, n_hint: Option<usize>) -> Result<EdgeListLoad> {
    let mut pairs = Vec::new();
    let mut self_loops = 0;
    let mut max_index: Option<usize> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .collect();
        if tokens.len() != 2 {
            return Err(Error::Parse {
                line: lineno + 1,
                msg: format!("expected two node indices, found {} fields", tokens.len()),
            });
        }
        let mut ends = [0usize; 2];
        for (slot, tok) in ends.iter_mut().zip(&tokens) {
            let v: i64 = tok.parse().map_err(|_| Error::Parse {
                line: lineno + 1,
                msg: format!("`{tok}` is not an integer"),
            })?;
            if v < 0 {
                return Err(Error::Domain(format!(
                    "negative node index {v} at line {}",
                    lineno + 1
                )));
            }
            *slot = v as usize;
        }
        let [i, j] = ends;
        max_index = Some(max_index.map_or(i.max(j), |m| m.max(i).max(j)));
        if i == j {
            self_loops += 1;
        } else {
            pairs.push((i.min(j), i.max(j)));
        }
    }
    let n = max_index.map_or(0, |m| m + 1).max(n_hint.unwrap_or(0));
    let raw_count = pairs.len();
    let graph = Graph::from_edges(n, pairs)?;
    if self_loops > 0 {
        log::warn!("dropped {self_loops} self-loop(s) from edge list");
    }
    Ok(EdgeListLoad {
        duplicates_collapsed: raw_count - graph.edge_count(),
        graph,
        self_loops_dropped: self_loops,
    })
}

pub fn format_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    for (i, j) in g.edges() {
        out.push_str(&format!("{i} {j}\n"));
    }
    out
}

pub fn write_edge_list(g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, format_edge_list(g))?;
    Ok(())
}

pub fn load_covariates(path: impl AsRef<Path>) -> Result<CovariateMatrix> {
    let text = fs::read_to_string(path)?;
    parse_covariates(&text)
}

/// Parses a numeric CSV. A first row containing any non-numeric field is
/// treated as a header and skipped.
pub fn parse_covariates(text: &str) -> Result<CovariateMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width: Option<usize> = None;
    for (idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse {
            line: idx + 1,
            msg: e.to_string(),
        })?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed: Vec<std::result::Result<f64, _>> =
            record.iter().map(str::parse::<f64>).collect();
        if idx == 0 && parsed.iter().any(|v| v.is_err()) {
            width = Some(record.len());
            continue;
        }
        let w = *width.get_or_insert(record.len());
        if record.len() != w {
            return Err(Error::Dimension(format!(
                "row {} has {} fields, expected {w}",
                idx + 1,
                record.len()
            )));
        }
        let mut row = Vec::with_capacity(w);
        for (col, (v, raw)) in parsed.into_iter().zip(record.iter()).enumerate() {
            row.push(v.map_err(|_| Error::ParseCell {
                row: idx + 1,
                col: col + 1,
                msg: format!("`{raw}` is not a number"),
            })?);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Dimension("covariate file has no data rows".into()));
    }
    CovariateMatrix::from_rows(&rows)
}

pub fn write_covariates(x: &CovariateMatrix, path: impl AsRef<Path>) -> Result<()> {
    write_matrix_csv(x.values(), None, path)
}

/// Writes a dense matrix as CSV; `header` names the columns when given.
pub fn write_matrix_csv(
    m: &DMatrix<f64>,
    header: Option<&[String]>,
    path: impl AsRef<Path>,
) -> Result<()> {
    let mut out = std::io::BufWriter::new(fs::File::create(path)?);
    if let Some(h) = header {
        writeln!(out, "{}", h.join(","))?;
    }
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| m[(i, j)].to_string()).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    out.flush()?;
    Ok(())
}

pub fn format_labels(labels: &LabelVector) -> String {
    let mut out = String::with_capacity(labels.n() * 2);
    for l in labels.as_slice() {
        out.push_str(&l.to_string());
        out.push('\n');
    }
    out
}

pub fn save_labels(labels: &LabelVector, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, format_labels(labels))?;
    Ok(())
}

pub fn load_labels(path: impl AsRef<Path>) -> Result<LabelVector> {
    parse_labels(&fs::read_to_string(path)?)
}

/// One non-negative integer per line; K is inferred as `max + 1`.
pub fn parse_labels(text: &str) -> Result<LabelVector> {
    let labels = parse_index_lines(text)?;
    if labels.is_empty() {
        return Err(Error::Parse {
            line: 1,
            msg: "label file is empty".into(),
        });
    }
    LabelVector::infer_k(labels)
}

/// Reads one node index per line (used for label and subset files).
pub fn parse_index_lines(text: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let v: usize = line.parse().map_err(|_| Error::Parse {
            line: lineno + 1,
            msg: format!("`{line}` is not a non-negative integer"),
        })?;
        out.push(v);
    }
    Ok(out)
}
