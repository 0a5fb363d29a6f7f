//! Which `(i, j, a_pos, b_pos)` products each method evaluates, in order.

use std::fmt;
use std::str::FromStr;

use crate::enc::{Layout, SparseMeta};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MatmulMethod {
    NaiveDense,
    NaiveSparse,
    CsrC,
    VcsrC,
}

impl MatmulMethod {
    pub const ALL: [MatmulMethod; 4] = [
        MatmulMethod::NaiveDense,
        MatmulMethod::NaiveSparse,
        MatmulMethod::CsrC,
        MatmulMethod::VcsrC,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            MatmulMethod::NaiveDense => "naive_dense",
            MatmulMethod::NaiveSparse => "naive_sparse",
            MatmulMethod::CsrC => "csr_c",
            MatmulMethod::VcsrC => "vcsr_c",
        }
    }

    /// Operand layouts: left operand first.
    pub fn layouts(&self, slice_height: usize) -> (Layout, Layout) {
        match self {
            MatmulMethod::NaiveDense | MatmulMethod::NaiveSparse => {
                (Layout::DenseRowMajor, Layout::DenseColMajor)
            }
            MatmulMethod::CsrC => (Layout::Csr, Layout::Csc),
            MatmulMethod::VcsrC => (Layout::Vcsr { slice_height }, Layout::Vcsc { slice_height }),
        }
    }
}

impl fmt::Display for MatmulMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MatmulMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MatmulMethod::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown method '{s}'")))
    }
}

/// When the naive sparse method skips a scalar product.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SkipRule {
    /// Skip if either factor is structurally zero.
    #[default]
    Either,
    /// Skip only if both factors are structurally zero.
    Both,
}

/// One scalar product: output `(i, j)` from the factors packed at `a_pos`
/// and `b_pos`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairStep {
    pub i: usize,
    pub j: usize,
    pub a_pos: usize,
    pub b_pos: usize,
}

impl PairStep {
    pub fn min_pos(&self) -> usize {
        self.a_pos.min(self.b_pos)
    }

    /// Row-major result slot.
    pub fn target(&self, dim: usize) -> usize {
        self.i * dim + self.j
    }

    /// Rotation moving the operand at the larger position onto the other;
    /// zero when the positions already agree.
    pub fn align_step(&self) -> i64 {
        (self.a_pos as i64 - self.b_pos as i64).abs()
    }

    /// Rotation moving the isolated product from `min_pos` to its target.
    pub fn accum_step(&self, dim: usize) -> i64 {
        self.min_pos() as i64 - self.target(dim) as i64
    }
}

fn mismatch(expected: &'static str, found: &SparseMeta) -> Error {
    Error::LayoutMismatch {
        expected,
        found: found.layout().name(),
    }
}

/// Two-pointer intersection of two index-sorted `(index, pos)` lists.
fn merge(i: usize, j: usize, a: &[(usize, usize)], b: &[(usize, usize)], out: &mut Vec<PairStep>) {
    let (mut x, mut y) = (0, 0);
    while x < a.len() && y < b.len() {
        let ((a_col, a_pos), (b_row, b_pos)) = (a[x], b[y]);
        if a_col == b_row {
            out.push(PairStep { i, j, a_pos, b_pos });
            x += 1;
            y += 1;
        } else if a_col < b_row {
            x += 1;
        } else {
            y += 1;
        }
    }
}

/// The ordered scalar products `method` evaluates for `a * b`. Output
/// entries are visited row-major in every method.
pub fn schedule(
    method: MatmulMethod,
    a: &SparseMeta,
    b: &SparseMeta,
    skip: SkipRule,
) -> Result<Vec<PairStep>> {
    let n = a.dim();
    if b.dim() != n {
        return Err(Error::DimensionMismatch {
            left: n,
            right: b.dim(),
        });
    }
    let mut out = Vec::new();
    match method {
        MatmulMethod::CsrC => {
            let SparseMeta::Csr {
                row_offsets,
                col_indices,
                ..
            } = a
            else {
                return Err(mismatch("csr", a));
            };
            let SparseMeta::Csc {
                col_offsets,
                row_indices,
                ..
            } = b
            else {
                return Err(mismatch("csc", b));
            };
            for i in 0..n {
                for j in 0..n {
                    let (mut a_pos, a_end) = (row_offsets[i], row_offsets[i + 1]);
                    let (mut b_pos, b_end) = (col_offsets[j], col_offsets[j + 1]);
                    while a_pos < a_end && b_pos < b_end {
                        let (a_col, b_row) = (col_indices[a_pos], row_indices[b_pos]);
                        if a_col == b_row {
                            out.push(PairStep { i, j, a_pos, b_pos });
                            a_pos += 1;
                            b_pos += 1;
                        } else if a_col < b_row {
                            a_pos += 1;
                        } else {
                            b_pos += 1;
                        }
                    }
                }
            }
        }
        MatmulMethod::VcsrC => {
            let (
                SparseMeta::Vcsr {
                    slice_height: ga, ..
                },
                SparseMeta::Vcsc {
                    slice_height: gb, ..
                },
            ) = (a, b)
            else {
                return Err(if matches!(a, SparseMeta::Vcsr { .. }) {
                    mismatch("vcsc", b)
                } else {
                    mismatch("vcsr", a)
                });
            };
            if ga != gb {
                return Err(Error::InvalidMatrix(format!(
                    "slice heights differ: {ga} and {gb}"
                )));
            }
            // per-row (col, slot) lists; the (col, row) order inside a slice
            // keeps each row's columns increasing
            let mut rows = vec![Vec::new(); n];
            for (r, c, p) in a.entries() {
                rows[r].push((c, p));
            }
            let mut cols = vec![Vec::new(); n];
            for (r, c, p) in b.entries() {
                cols[c].push((r, p));
            }
            for (i, row) in rows.iter().enumerate() {
                for (j, col) in cols.iter().enumerate() {
                    merge(i, j, row, col, &mut out);
                }
            }
        }
        MatmulMethod::NaiveDense | MatmulMethod::NaiveSparse => {
            let SparseMeta::DenseRowMajor { nonzero: nz_a, .. } = a else {
                return Err(mismatch("dense_row_major", a));
            };
            let SparseMeta::DenseColMajor { nonzero: nz_b, .. } = b else {
                return Err(mismatch("dense_col_major", b));
            };
            for i in 0..n {
                for j in 0..n {
                    for l in 0..n {
                        let (a_pos, b_pos) = (i * n + l, j * n + l);
                        if method == MatmulMethod::NaiveSparse {
                            let skip = match skip {
                                SkipRule::Either => !nz_a[a_pos] || !nz_b[b_pos],
                                SkipRule::Both => !nz_a[a_pos] && !nz_b[b_pos],
                            };
                            if skip {
                                continue;
                            }
                        }
                        out.push(PairStep { i, j, a_pos, b_pos });
                    }
                }
            }
        }
    }
    Ok(out)
}
