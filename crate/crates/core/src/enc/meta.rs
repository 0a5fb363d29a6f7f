use std::fmt;
use std::str::FromStr;

use crate::sparse::{CscMatrix, CsrMatrix, DenseMatrix, VcscMatrix, VcsrMatrix};
use crate::{Error, Result};

/// How a matrix's values are packed into ciphertext slots.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Layout {
    Csr,
    Csc,
    Vcsr { slice_height: usize },
    Vcsc { slice_height: usize },
    DenseRowMajor,
    DenseColMajor,
}

impl Layout {
    pub fn name(&self) -> &'static str {
        match self {
            Layout::Csr => "csr",
            Layout::Csc => "csc",
            Layout::Vcsr { .. } => "vcsr",
            Layout::Vcsc { .. } => "vcsc",
            Layout::DenseRowMajor => "dense_row_major",
            Layout::DenseColMajor => "dense_col_major",
        }
    }
}

impl fmt::Display for Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Layout {
    type Err = Error;

    /// Sliced layouts parse with the default slice height.
    fn from_str(s: &str) -> Result<Self> {
        use crate::sparse::DEFAULT_SLICE_HEIGHT as G;
        Ok(match s {
            "csr" => Layout::Csr,
            "csc" => Layout::Csc,
            "vcsr" => Layout::Vcsr { slice_height: G },
            "vcsc" => Layout::Vcsc { slice_height: G },
            "dense_row_major" => Layout::DenseRowMajor,
            "dense_col_major" => Layout::DenseColMajor,
            other => return Err(Error::Parse(format!("unknown layout '{other}'"))),
        })
    }
}

/// Plaintext structure of an encrypted matrix. Holds no values.
///
/// Dense layouts pack all `N^2` entries; their `nonzero` mask (in packing
/// order) records which entries are structurally zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SparseMeta {
    Csr {
        dim: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
    },
    Csc {
        dim: usize,
        col_offsets: Vec<usize>,
        row_indices: Vec<usize>,
    },
    Vcsr {
        dim: usize,
        slice_height: usize,
        slice_offsets: Vec<usize>,
        entry_rows: Vec<usize>,
        entry_cols: Vec<usize>,
    },
    Vcsc {
        dim: usize,
        slice_height: usize,
        slice_offsets: Vec<usize>,
        entry_rows: Vec<usize>,
        entry_cols: Vec<usize>,
    },
    DenseRowMajor {
        dim: usize,
        nonzero: Vec<bool>,
    },
    DenseColMajor {
        dim: usize,
        nonzero: Vec<bool>,
    },
}

impl From<&CsrMatrix> for SparseMeta {
    fn from(m: &CsrMatrix) -> Self {
        SparseMeta::Csr {
            dim: m.dim(),
            row_offsets: m.row_offsets().to_vec(),
            col_indices: m.col_indices().to_vec(),
        }
    }
}

impl From<&CscMatrix> for SparseMeta {
    fn from(m: &CscMatrix) -> Self {
        SparseMeta::Csc {
            dim: m.dim(),
            col_offsets: m.col_offsets().to_vec(),
            row_indices: m.row_indices().to_vec(),
        }
    }
}

impl From<&VcsrMatrix> for SparseMeta {
    fn from(m: &VcsrMatrix) -> Self {
        SparseMeta::Vcsr {
            dim: m.dim(),
            slice_height: m.slice_height(),
            slice_offsets: m.slice_offsets().to_vec(),
            entry_rows: m.entry_rows().to_vec(),
            entry_cols: m.entry_cols().to_vec(),
        }
    }
}

impl From<&VcscMatrix> for SparseMeta {
    fn from(m: &VcscMatrix) -> Self {
        SparseMeta::Vcsc {
            dim: m.dim(),
            slice_height: m.slice_height(),
            slice_offsets: m.slice_offsets().to_vec(),
            entry_rows: m.entry_rows().to_vec(),
            entry_cols: m.entry_cols().to_vec(),
        }
    }
}

/// Packed slot values and metadata of `m` in the given layout.
pub fn pack(m: &DenseMatrix, layout: Layout) -> Result<(Vec<f64>, SparseMeta)> {
    let dim = m.dim();
    Ok(match layout {
        Layout::Csr => {
            let f = CsrMatrix::from_dense(m);
            (f.values().to_vec(), (&f).into())
        }
        Layout::Csc => {
            let f = CscMatrix::from_dense(m);
            (f.values().to_vec(), (&f).into())
        }
        Layout::Vcsr { slice_height } => {
            let f = VcsrMatrix::from_dense(m, slice_height)?;
            (f.values().to_vec(), (&f).into())
        }
        Layout::Vcsc { slice_height } => {
            let f = VcscMatrix::from_dense(m, slice_height)?;
            (f.values().to_vec(), (&f).into())
        }
        Layout::DenseRowMajor => {
            let v = m.values().to_vec();
            let nonzero = v.iter().map(|&x| x != 0.0).collect();
            (v, SparseMeta::DenseRowMajor { dim, nonzero })
        }
        Layout::DenseColMajor => {
            let v = m.col_major_values();
            let nonzero = v.iter().map(|&x| x != 0.0).collect();
            (v, SparseMeta::DenseColMajor { dim, nonzero })
        }
    })
}

impl SparseMeta {
    pub fn dim(&self) -> usize {
        match self {
            SparseMeta::Csr { dim, .. }
            | SparseMeta::Csc { dim, .. }
            | SparseMeta::Vcsr { dim, .. }
            | SparseMeta::Vcsc { dim, .. }
            | SparseMeta::DenseRowMajor { dim, .. }
            | SparseMeta::DenseColMajor { dim, .. } => *dim,
        }
    }

    pub fn layout(&self) -> Layout {
        match self {
            SparseMeta::Csr { .. } => Layout::Csr,
            SparseMeta::Csc { .. } => Layout::Csc,
            SparseMeta::Vcsr { slice_height, .. } => Layout::Vcsr {
                slice_height: *slice_height,
            },
            SparseMeta::Vcsc { slice_height, .. } => Layout::Vcsc {
                slice_height: *slice_height,
            },
            SparseMeta::DenseRowMajor { .. } => Layout::DenseRowMajor,
            SparseMeta::DenseColMajor { .. } => Layout::DenseColMajor,
        }
    }

    /// Number of packed slots in use.
    pub fn packed_len(&self) -> usize {
        match self {
            SparseMeta::Csr { col_indices, .. } => col_indices.len(),
            SparseMeta::Csc { row_indices, .. } => row_indices.len(),
            SparseMeta::Vcsr { entry_rows, .. } | SparseMeta::Vcsc { entry_rows, .. } => {
                entry_rows.len()
            }
            SparseMeta::DenseRowMajor { nonzero, .. }
            | SparseMeta::DenseColMajor { nonzero, .. } => nonzero.len(),
        }
    }

    /// Structural nonzero count.
    pub fn nnz(&self) -> usize {
        match self {
            SparseMeta::DenseRowMajor { nonzero, .. }
            | SparseMeta::DenseColMajor { nonzero, .. } => nonzero.iter().filter(|&&b| b).count(),
            _ => self.packed_len(),
        }
    }

    /// Slot of every packed entry as `(row, col, slot)`, in slot order.
    pub fn entries(&self) -> Vec<(usize, usize, usize)> {
        match self {
            SparseMeta::Csr {
                dim,
                row_offsets,
                col_indices,
            } => (0..*dim)
                .flat_map(|r| (row_offsets[r]..row_offsets[r + 1]).map(move |p| (r, p)))
                .map(|(r, p)| (r, col_indices[p], p))
                .collect(),
            SparseMeta::Csc {
                dim,
                col_offsets,
                row_indices,
            } => (0..*dim)
                .flat_map(|c| (col_offsets[c]..col_offsets[c + 1]).map(move |p| (c, p)))
                .map(|(c, p)| (row_indices[p], c, p))
                .collect(),
            SparseMeta::Vcsr {
                entry_rows,
                entry_cols,
                ..
            }
            | SparseMeta::Vcsc {
                entry_rows,
                entry_cols,
                ..
            } => entry_rows
                .iter()
                .zip(entry_cols)
                .enumerate()
                .map(|(p, (&r, &c))| (r, c, p))
                .collect(),
            SparseMeta::DenseRowMajor { dim, .. } => {
                (0..dim * dim).map(|p| (p / dim, p % dim, p)).collect()
            }
            SparseMeta::DenseColMajor { dim, .. } => {
                (0..dim * dim).map(|p| (p % dim, p / dim, p)).collect()
            }
        }
    }

    /// Whether the packed entry at `slot` is structurally nonzero.
    pub fn is_structural(&self, slot: usize) -> bool {
        match self {
            SparseMeta::DenseRowMajor { nonzero, .. }
            | SparseMeta::DenseColMajor { nonzero, .. } => nonzero[slot],
            _ => slot < self.packed_len(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_names_roundtrip() {
        for l in [
            Layout::Csr,
            Layout::Csc,
            Layout::Vcsr { slice_height: 4 },
            Layout::Vcsc { slice_height: 4 },
            Layout::DenseRowMajor,
            Layout::DenseColMajor,
        ] {
            assert_eq!(l.name().parse::<Layout>().unwrap(), l);
        }
        assert!("coo".parse::<Layout>().is_err());
    }

    #[test]
    fn entries_follow_packing_order() {
        let m = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 3.0]]).unwrap();
        for layout in [
            Layout::Csr,
            Layout::Csc,
            Layout::Vcsr { slice_height: 1 },
            Layout::DenseColMajor,
        ] {
            let (values, meta) = pack(&m, layout).unwrap();
            for (r, c, p) in meta.entries() {
                assert_eq!(values[p], m.get(r, c), "{layout}");
            }
        }
        let (_, meta) = pack(&m, Layout::DenseRowMajor).unwrap();
        assert_eq!(meta.nnz(), 3);
        assert_eq!(meta.packed_len(), 4);
        assert!(!meta.is_structural(2));
    }
}
