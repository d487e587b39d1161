//! Matrix Market coordinate files (`real`/`integer`, `symmetric`/`general`).
//!
//! Indices in the file are 1-based. Symmetric files carry one triangle and
//! are expanded on load; general files must describe a symmetric matrix.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::SparseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    Symmetric,
    General,
}

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<SparseMatrix> {
    let path = path.as_ref();
    let file = File::open(path)?;
    read_matrix_market_from(BufReader::new(file))
}

pub fn read_matrix_market_from<R: BufRead>(reader: R) -> Result<SparseMatrix> {
    let mut lines = reader.lines().enumerate();

    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Format("empty file".into()))?;
    let symmetry = parse_header(&header?)?;

    let mut size: Option<(usize, usize)> = None;
    let mut triplets = Vec::new();
    for (lineno, line) in lines {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let lineno = lineno + 1;
        let mut fields = trimmed.split_whitespace();
        match size {
            None => {
                let rows = parse_usize(fields.next(), lineno, "row count")?;
                let cols = parse_usize(fields.next(), lineno, "column count")?;
                let nnz = parse_usize(fields.next(), lineno, "entry count")?;
                if rows != cols {
                    return Err(Error::Format(format!(
                        "line {lineno}: matrix is {rows}x{cols}, expected square"
                    )));
                }
                triplets.reserve(nnz);
                size = Some((rows, nnz));
            }
            Some((n, _)) => {
                let i = parse_usize(fields.next(), lineno, "row index")?;
                let j = parse_usize(fields.next(), lineno, "column index")?;
                let v: f64 = fields
                    .next()
                    .ok_or_else(|| Error::Format(format!("line {lineno}: missing value")))?
                    .parse()
                    .map_err(|e| Error::Format(format!("line {lineno}: bad value: {e}")))?;
                if i == 0 || j == 0 || i > n || j > n {
                    return Err(Error::Format(format!(
                        "line {lineno}: index ({i},{j}) outside 1..={n}"
                    )));
                }
                triplets.push((i - 1, j - 1, v));
            }
        }
    }

    let (n, nnz) = size.ok_or_else(|| Error::Format("missing size line".into()))?;
    if triplets.len() != nnz {
        return Err(Error::Format(format!(
            "size line declares {nnz} entries, found {}",
            triplets.len()
        )));
    }
    SparseMatrix::from_triplets(n, &triplets, symmetry == Symmetry::Symmetric).map_err(|e| match e {
        Error::Input(msg) => Error::Format(msg),
        other => other,
    })
}

fn parse_header(line: &str) -> Result<Symmetry> {
    let tokens: Vec<String> = line.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(Error::Format(format!("not a Matrix Market header: {line:?}")));
    }
    if tokens[2] != "coordinate" {
        return Err(Error::Format(format!(
            "unsupported storage format {:?}",
            tokens[2]
        )));
    }
    match tokens[3].as_str() {
        "real" | "integer" | "double" => {}
        other => return Err(Error::Format(format!("unsupported field {other:?}"))),
    }
    match tokens[4].as_str() {
        "symmetric" => Ok(Symmetry::Symmetric),
        "general" => Ok(Symmetry::General),
        other => Err(Error::Format(format!("unsupported symmetry {other:?}"))),
    }
}

fn parse_usize(tok: Option<&str>, lineno: usize, what: &str) -> Result<usize> {
    tok.ok_or_else(|| Error::Format(format!("line {lineno}: missing {what}")))?
        .parse()
        .map_err(|e| Error::Format(format!("line {lineno}: bad {what}: {e}")))
}

/// Writes the lower triangle with a `symmetric` header.
pub fn write_matrix_market<W: Write>(a: &SparseMatrix, mut out: W) -> Result<()> {
    let n = a.dim();
    let lower: Vec<(usize, usize, f64)> = (0..n)
        .flat_map(|i| a.row(i).filter(move |&(j, _)| j <= i).map(move |(j, v)| (i, j, v)))
        .collect();
    writeln!(out, "%%MatrixMarket matrix coordinate real symmetric")?;
    writeln!(out, "{n} {n} {}", lower.len())?;
    for (i, j, v) in lower {
        writeln!(out, "{} {} {:.17e}", i + 1, j + 1, v)?;
    }
    Ok(())
}
