use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use sparsefhe_core::sparse::io::{read_dense_csv, read_matrix_market, write_matrix_market};
use sparsefhe_core::DenseMatrix;

use crate::config::matrix_pair;

/// Writes the operand pair for `(dim, sparsity, seed)` as `a.mtx` and
/// `b.mtx` under `dir`, creating it if needed.
pub fn write_pair(
    dir: &Path,
    dim: usize,
    sparsity: f64,
    seed: u64,
) -> anyhow::Result<[PathBuf; 2]> {
    let (a, b) = matrix_pair(dim, sparsity, seed)?;
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let paths = [dir.join("a.mtx"), dir.join("b.mtx")];
    for (m, path) in [&a, &b].into_iter().zip(&paths) {
        let mut w = BufWriter::new(
            File::create(path).with_context(|| format!("creating {}", path.display()))?,
        );
        write_matrix_market(&mut w, m)?;
        w.flush()?;
    }
    Ok(paths)
}

/// Reads a matrix as dense CSV when the extension is `.csv`, otherwise as
/// MatrixMarket coordinate text.
pub fn load_matrix(path: &Path) -> anyhow::Result<DenseMatrix> {
    let r =
        BufReader::new(File::open(path).with_context(|| format!("opening {}", path.display()))?);
    let m = if path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
    {
        read_dense_csv(r)
    } else {
        read_matrix_market(r)
    };
    m.with_context(|| format!("reading {}", path.display()))
}
