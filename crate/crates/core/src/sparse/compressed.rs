//! Compressed row (CSR) and compressed column (CSC) storage.

use super::DenseMatrix;
use crate::{Error, Result};

/// Offsets, strictly increasing inner indices per outer line, and values.
/// CSR and CSC differ only in which dense index is the outer one.
#[derive(Clone, Debug, PartialEq)]
struct Compressed {
    dim: usize,
    offsets: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl Compressed {
    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidMatrix(msg));
        let (n, k) = (self.dim, self.values.len());
        if n == 0 {
            return bad("dimension must be at least 1".into());
        }
        if self.offsets.len() != n + 1 {
            return bad(format!(
                "expected {} offsets, found {}",
                n + 1,
                self.offsets.len()
            ));
        }
        if self.indices.len() != k {
            return bad(format!("{} indices for {k} values", self.indices.len()));
        }
        if self.offsets[0] != 0 || self.offsets[n] != k {
            return bad(format!("offsets must run from 0 to {k}"));
        }
        if self.offsets.windows(2).any(|w| w[0] > w[1]) {
            return bad("offsets are not monotone".into());
        }
        for line in 0..n {
            let idx = &self.indices[self.offsets[line]..self.offsets[line + 1]];
            if idx.windows(2).any(|w| w[0] >= w[1]) {
                return bad(format!(
                    "indices of line {line} are not strictly increasing"
                ));
            }
            if idx.last().is_some_and(|&i| i >= n) {
                return bad(format!("index out of range in line {line}"));
            }
        }
        if self.values.iter().any(|&v| v == 0.0 || !v.is_finite()) {
            return bad("stored values must be finite and nonzero".into());
        }
        Ok(())
    }

    /// `at(outer, inner)` reads the dense entry.
    fn build(dim: usize, at: impl Fn(usize, usize) -> f64) -> Self {
        let mut offsets = Vec::with_capacity(dim + 1);
        let (mut indices, mut values) = (Vec::new(), Vec::new());
        offsets.push(0);
        for outer in 0..dim {
            for inner in 0..dim {
                let v = at(outer, inner);
                if v != 0.0 {
                    indices.push(inner);
                    values.push(v);
                }
            }
            offsets.push(values.len());
        }
        Self {
            dim,
            offsets,
            indices,
            values,
        }
    }

    fn line(&self, outer: usize) -> std::ops::Range<usize> {
        self.offsets[outer]..self.offsets[outer + 1]
    }

    fn scatter(&self, mut put: impl FnMut(usize, usize, f64)) {
        for outer in 0..self.dim {
            for p in self.line(outer) {
                put(outer, self.indices[p], self.values[p]);
            }
        }
    }
}

macro_rules! compressed_format {
    ($(#[$doc:meta])* $name:ident, $offsets:ident, $indices:ident, $outer:literal) => {
        $(#[$doc])*
        #[derive(Clone, Debug, PartialEq)]
        pub struct $name(Compressed);

        impl $name {
            pub fn from_parts(
                dim: usize,
                $offsets: Vec<usize>,
                $indices: Vec<usize>,
                values: Vec<f64>,
            ) -> Result<Self> {
                let c = Compressed { dim, offsets: $offsets, indices: $indices, values };
                c.validate()?;
                Ok(Self(c))
            }

            pub fn dim(&self) -> usize {
                self.0.dim
            }

            pub fn nnz(&self) -> usize {
                self.0.values.len()
            }

            pub fn $offsets(&self) -> &[usize] {
                &self.0.offsets
            }

            pub fn $indices(&self) -> &[usize] {
                &self.0.indices
            }

            pub fn values(&self) -> &[f64] {
                &self.0.values
            }

            #[doc = concat!("Storage positions of ", $outer, " `outer`.")]
            pub fn range(&self, outer: usize) -> std::ops::Range<usize> {
                self.0.line(outer)
            }
        }
    };
}

compressed_format!(
    /// Compressed sparse row storage.
    CsrMatrix,
    row_offsets,
    col_indices,
    "row"
);
compressed_format!(
    /// Compressed sparse column storage.
    CscMatrix,
    col_offsets,
    row_indices,
    "column"
);

impl CsrMatrix {
    pub fn from_dense(m: &DenseMatrix) -> Self {
        Self(Compressed::build(m.dim(), |r, c| m.get(r, c)))
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.dim());
        self.0.scatter(|r, c, v| out.set(r, c, v));
        out
    }
}

impl CscMatrix {
    pub fn from_dense(m: &DenseMatrix) -> Self {
        Self(Compressed::build(m.dim(), |c, r| m.get(r, c)))
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.dim());
        self.0.scatter(|c, r, v| out.set(r, c, v));
        out
    }
}
