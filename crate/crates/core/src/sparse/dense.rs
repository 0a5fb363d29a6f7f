use crate::{Error, Result};

/// Square matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    dim: usize,
    values: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(dim: usize, values: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidMatrix("dimension must be at least 1".into()));
        }
        if values.len() != dim * dim {
            return Err(Error::InvalidMatrix(format!(
                "{} values for a {dim}x{dim} matrix",
                values.len()
            )));
        }
        Ok(Self { dim, values })
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be at least 1");
        Self {
            dim,
            values: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidMatrix(
                "rows must all have length equal to the row count".into(),
            ));
        }
        Self::new(dim, rows.concat())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row-major values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.values[row * self.dim + col] = value;
    }

    pub fn is_nonzero(&self, row: usize, col: usize) -> bool {
        self.get(row, col) != 0.0
    }

    pub fn nnz(&self) -> usize {
        self.values.iter().filter(|&&v| v != 0.0).count()
    }

    /// Values in column-major order.
    pub fn col_major_values(&self) -> Vec<f64> {
        let n = self.dim;
        (0..n * n).map(|p| self.get(p % n, p / n)).collect()
    }

    pub fn transpose(&self) -> Self {
        Self {
            dim: self.dim,
            values: self.col_major_values(),
        }
    }
}
