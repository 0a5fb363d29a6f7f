//! MatrixMarket coordinate files and dense CSV.

use std::io::{BufRead, Write};

use super::DenseMatrix;
use crate::{Error, Result};

const HEADER: &str = "%%MatrixMarket matrix coordinate real general";

/// Writes the nonzeros of `m` with 1-based indices in row-major order.
/// Values use the shortest representation that parses back exactly.
pub fn write_matrix_market(w: &mut impl Write, m: &DenseMatrix) -> Result<()> {
    let n = m.dim();
    writeln!(w, "{HEADER}")?;
    writeln!(w, "{n} {n} {}", m.nnz())?;
    for i in 0..n {
        for j in 0..n {
            let v = m.get(i, j);
            if v != 0.0 {
                writeln!(w, "{} {} {v:?}", i + 1, j + 1)?;
            }
        }
    }
    Ok(())
}

fn parse_err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("line {line}: {msg}"))
}

/// Reads a square real (or integer) general coordinate matrix.
pub fn read_matrix_market(r: impl BufRead) -> Result<DenseMatrix> {
    let mut lines = r.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Parse("empty input".into()))?;
    let header = header?;
    let fields: Vec<String> = header
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    let ok = fields.len() == 5
        && fields[0] == "%%matrixmarket"
        && fields[1] == "matrix"
        && fields[2] == "coordinate"
        && (fields[3] == "real" || fields[3] == "integer")
        && fields[4] == "general";
    if !ok {
        return Err(parse_err(1, format!("unsupported header '{header}'")));
    }

    let mut content = lines.filter_map(|(no, l)| match l {
        Ok(l) if l.trim().is_empty() || l.trim_start().starts_with('%') => None,
        other => Some((no, other)),
    });
    let (no, size) = content
        .next()
        .ok_or_else(|| Error::Parse("missing size line".into()))?;
    let size: Vec<usize> = size?
        .split_whitespace()
        .map(|t| t.parse().map_err(|e| parse_err(no, e)))
        .collect::<Result<_>>()?;
    let [rows, cols, entries] = size[..] else {
        return Err(parse_err(no, "size line needs three integers"));
    };
    if rows != cols || rows == 0 {
        return Err(parse_err(
            no,
            format!("expected a non-empty square matrix, found {rows}x{cols}"),
        ));
    }

    let mut m = DenseMatrix::zeros(rows);
    let mut seen = vec![false; rows * rows];
    let mut count = 0;
    for (no, line) in content {
        let line = line?;
        let t: Vec<&str> = line.split_whitespace().collect();
        if t.len() != 3 {
            return Err(parse_err(no, "expected 'row col value'"));
        }
        let i: usize = t[0].parse().map_err(|e| parse_err(no, e))?;
        let j: usize = t[1].parse().map_err(|e| parse_err(no, e))?;
        let v: f64 = t[2].parse().map_err(|e| parse_err(no, e))?;
        if i == 0 || j == 0 || i > rows || j > rows {
            return Err(parse_err(no, format!("index ({i}, {j}) out of range")));
        }
        if !v.is_finite() {
            return Err(parse_err(no, "non-finite value"));
        }
        let p = (i - 1) * rows + (j - 1);
        if std::mem::replace(&mut seen[p], true) {
            return Err(parse_err(no, format!("duplicate entry ({i}, {j})")));
        }
        m.set(i - 1, j - 1, v);
        count += 1;
    }
    if count != entries {
        return Err(Error::Parse(format!(
            "size line declares {entries} entries, found {count}"
        )));
    }
    Ok(m)
}

/// Reads a square matrix given as one comma-separated row per line.
pub fn read_dense_csv(r: impl BufRead) -> Result<DenseMatrix> {
    let mut rows = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|e| parse_err(i + 1, e)))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    DenseMatrix::from_rows(&rows)
}

pub fn write_dense_csv(w: &mut impl Write, m: &DenseMatrix) -> Result<()> {
    for row in m.values().chunks(m.dim()) {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}
