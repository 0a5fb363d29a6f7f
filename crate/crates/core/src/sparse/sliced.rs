//! Vertical sliced layouts (VCSR and VCSC).
//!
//! VCSR cuts the rows into slices of `slice_height` consecutive rows and
//! stores each slice column by column: entries are ordered by
//! `(col, row)` inside a slice. VCSC is the transpose: slices of columns,
//! ordered by `(row, col)`.

use super::DenseMatrix;
use crate::{Error, Result};

pub const DEFAULT_SLICE_HEIGHT: usize = 4;

/// `major` is the sliced dense index (row for VCSR), `minor` the other.
/// Entries in a slice are sorted by `(minor, major)`.
#[derive(Clone, Debug, PartialEq)]
struct Sliced {
    dim: usize,
    slice_height: usize,
    slice_offsets: Vec<usize>,
    major: Vec<usize>,
    minor: Vec<usize>,
    values: Vec<f64>,
}

impl Sliced {
    fn num_slices(dim: usize, height: usize) -> usize {
        dim.div_ceil(height)
    }

    fn build(dim: usize, height: usize, at: impl Fn(usize, usize) -> f64) -> Result<Self> {
        if height == 0 {
            return Err(Error::InvalidMatrix(
                "slice height must be at least 1".into(),
            ));
        }
        let mut slice_offsets = vec![0];
        let (mut major, mut minor, mut values) = (Vec::new(), Vec::new(), Vec::new());
        for s in 0..Self::num_slices(dim, height) {
            let lines = s * height..((s + 1) * height).min(dim);
            for mi in 0..dim {
                for ma in lines.clone() {
                    let v = at(ma, mi);
                    if v != 0.0 {
                        major.push(ma);
                        minor.push(mi);
                        values.push(v);
                    }
                }
            }
            slice_offsets.push(values.len());
        }
        Ok(Self {
            dim,
            slice_height: height,
            slice_offsets,
            major,
            minor,
            values,
        })
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidMatrix(msg));
        let (n, g, k) = (self.dim, self.slice_height, self.values.len());
        if n == 0 || g == 0 {
            return bad("dimension and slice height must be at least 1".into());
        }
        let slices = Self::num_slices(n, g);
        if self.slice_offsets.len() != slices + 1 {
            return bad(format!(
                "expected {} slice offsets, found {}",
                slices + 1,
                self.slice_offsets.len()
            ));
        }
        if self.major.len() != k || self.minor.len() != k {
            return bad("entry coordinates and values differ in length".into());
        }
        if self.slice_offsets[0] != 0 || self.slice_offsets[slices] != k {
            return bad(format!("slice offsets must run from 0 to {k}"));
        }
        if self.slice_offsets.windows(2).any(|w| w[0] > w[1]) {
            return bad("slice offsets are not monotone".into());
        }
        for s in 0..slices {
            let range = self.slice_offsets[s]..self.slice_offsets[s + 1];
            for p in range.clone() {
                if self.major[p] / g != s || self.minor[p] >= n {
                    return bad(format!("entry {p} lies outside slice {s}"));
                }
                if p > range.start
                    && (self.minor[p - 1], self.major[p - 1]) >= (self.minor[p], self.major[p])
                {
                    return bad(format!("entries of slice {s} are not strictly ordered"));
                }
            }
        }
        if self.values.iter().any(|&v| v == 0.0 || !v.is_finite()) {
            return bad("stored values must be finite and nonzero".into());
        }
        Ok(())
    }

    fn scatter(&self, mut put: impl FnMut(usize, usize, f64)) {
        for p in 0..self.values.len() {
            put(self.major[p], self.minor[p], self.values[p]);
        }
    }
}

/// Vertical compressed sparse row storage.
#[derive(Clone, Debug, PartialEq)]
pub struct VcsrMatrix(Sliced);

/// Vertical compressed sparse column storage.
#[derive(Clone, Debug, PartialEq)]
pub struct VcscMatrix(Sliced);

impl VcsrMatrix {
    pub fn from_dense(m: &DenseMatrix, slice_height: usize) -> Result<Self> {
        Ok(Self(Sliced::build(m.dim(), slice_height, |r, c| {
            m.get(r, c)
        })?))
    }

    pub fn from_parts(
        dim: usize,
        slice_height: usize,
        slice_offsets: Vec<usize>,
        entry_rows: Vec<usize>,
        entry_cols: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        let s = Sliced {
            dim,
            slice_height,
            slice_offsets,
            major: entry_rows,
            minor: entry_cols,
            values,
        };
        s.validate()?;
        Ok(Self(s))
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.dim());
        self.0.scatter(|r, c, v| out.set(r, c, v));
        out
    }

    pub fn entry_rows(&self) -> &[usize] {
        &self.0.major
    }

    pub fn entry_cols(&self) -> &[usize] {
        &self.0.minor
    }
}

impl VcscMatrix {
    pub fn from_dense(m: &DenseMatrix, slice_height: usize) -> Result<Self> {
        Ok(Self(Sliced::build(m.dim(), slice_height, |c, r| {
            m.get(r, c)
        })?))
    }

    pub fn from_parts(
        dim: usize,
        slice_height: usize,
        slice_offsets: Vec<usize>,
        entry_rows: Vec<usize>,
        entry_cols: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        let s = Sliced {
            dim,
            slice_height,
            slice_offsets,
            major: entry_cols,
            minor: entry_rows,
            values,
        };
        s.validate()?;
        Ok(Self(s))
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.dim());
        self.0.scatter(|c, r, v| out.set(r, c, v));
        out
    }

    pub fn entry_rows(&self) -> &[usize] {
        &self.0.minor
    }

    pub fn entry_cols(&self) -> &[usize] {
        &self.0.major
    }
}

macro_rules! sliced_common {
    ($name:ident) => {
        impl $name {
            pub fn dim(&self) -> usize {
                self.0.dim
            }

            pub fn slice_height(&self) -> usize {
                self.0.slice_height
            }

            pub fn slice_offsets(&self) -> &[usize] {
                &self.0.slice_offsets
            }

            pub fn values(&self) -> &[f64] {
                &self.0.values
            }

            pub fn nnz(&self) -> usize {
                self.0.values.len()
            }
        }
    };
}

sliced_common!(VcsrMatrix);
sliced_common!(VcscMatrix);

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> DenseMatrix {
        DenseMatrix::from_rows(&[
            vec![1.0, 0.0, 2.0, 0.0],
            vec![0.0, 3.0, 4.0, 0.0],
            vec![5.0, 0.0, 0.0, 6.0],
            vec![0.0, 0.0, 7.0, 8.0],
        ])
        .unwrap()
    }

    #[test]
    fn vcsr_orders_each_slice_column_by_column() {
        let v = VcsrMatrix::from_dense(&sample(), 2).unwrap();
        assert_eq!(v.slice_offsets(), &[0, 4, 8]);
        assert_eq!(v.entry_rows(), &[0, 1, 0, 1, 2, 3, 2, 3]);
        assert_eq!(v.entry_cols(), &[0, 1, 2, 2, 0, 2, 3, 3]);
        assert_eq!(v.values(), &[1.0, 3.0, 2.0, 4.0, 5.0, 7.0, 6.0, 8.0]);
        assert_eq!(v.to_dense(), sample());
    }

    #[test]
    fn vcsc_orders_each_slice_row_by_row() {
        let v = VcscMatrix::from_dense(&sample(), 2).unwrap();
        assert_eq!(v.slice_offsets(), &[0, 3, 8]);
        assert_eq!(v.entry_rows(), &[0, 1, 2, 0, 1, 2, 3, 3]);
        assert_eq!(v.entry_cols(), &[0, 1, 0, 2, 2, 3, 2, 3]);
        assert_eq!(v.to_dense(), sample());
    }

    #[test]
    fn ragged_last_slice() {
        let m = DenseMatrix::identity(5);
        let v = VcsrMatrix::from_dense(&m, 4).unwrap();
        assert_eq!(v.slice_offsets(), &[0, 4, 5]);
        assert_eq!(v.to_dense(), m);
        assert!(VcsrMatrix::from_dense(&m, 0).is_err());
    }

    #[test]
    fn rejects_malformed_parts() {
        // row 2 placed in slice 0
        assert!(VcsrMatrix::from_parts(4, 2, vec![0, 1, 1], vec![2], vec![0], vec![1.0]).is_err());
        // unsorted within a slice
        assert!(VcsrMatrix::from_parts(
            4,
            2,
            vec![0, 2, 2],
            vec![0, 1],
            vec![1, 0],
            vec![1.0, 1.0]
        )
        .is_err());
        // duplicate coordinate
        assert!(VcsrMatrix::from_parts(
            4,
            2,
            vec![0, 2, 2],
            vec![0, 0],
            vec![1, 1],
            vec![1.0, 1.0]
        )
        .is_err());
        assert!(
            VcsrMatrix::from_parts(4, 2, vec![0, 2], vec![0, 1], vec![1, 1], vec![1.0, 1.0])
                .is_err()
        );
        assert!(VcsrMatrix::from_parts(
            4,
            2,
            vec![0, 2, 2],
            vec![1, 0],
            vec![0, 1],
            vec![1.0, 1.0]
        )
        .is_ok());
        assert!(VcscMatrix::from_parts(4, 2, vec![0, 1, 1], vec![0], vec![3], vec![1.0]).is_err());
    }
}
