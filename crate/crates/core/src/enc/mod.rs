//! Encrypted matrices: values packed into one ciphertext in the layout's
//! traversal order, structure kept in plaintext metadata.

mod meta;

use std::collections::BTreeSet;

use rand::Rng;

pub use meta::{pack, Layout, SparseMeta};

use crate::ckks::{Ciphertext, CkksContext, KeyBundle};
use crate::sparse::DenseMatrix;
use crate::{Error, Result};

/// Largest supported dimension is the one with `2 N^2 <= slots`.
pub fn check_capacity(dim: usize, slots: usize) -> Result<()> {
    if 2 * dim * dim > slots {
        return Err(Error::CapacityExceeded { dim, slots });
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct EncryptedSparseMatrix {
    pub(crate) ctxt: Ciphertext,
    pub(crate) meta: SparseMeta,
}

impl EncryptedSparseMatrix {
    pub fn ciphertext(&self) -> &Ciphertext {
        &self.ctxt
    }

    pub fn meta(&self) -> &SparseMeta {
        &self.meta
    }

    pub fn dim(&self) -> usize {
        self.meta.dim()
    }
}

/// Packs `m` in `layout` and encrypts it at the top level and default scale.
/// Slots past the packed values hold zero.
pub fn encrypt_sparse(
    ctx: &CkksContext,
    m: &DenseMatrix,
    layout: Layout,
    keys: &KeyBundle,
    rng: &mut impl Rng,
) -> Result<EncryptedSparseMatrix> {
    check_capacity(m.dim(), ctx.slots())?;
    let (values, meta) = pack(m, layout)?;
    let pt = ctx.encode(&values, ctx.params().default_scale(), ctx.top_level())?;
    let ctxt = ctx.encrypt(&pt, keys, rng)?;
    Ok(EncryptedSparseMatrix { ctxt, meta })
}

/// Product matrix in row-major slots `0..N^2`. `None` means no partial
/// product was ever formed, and the result is exactly zero.
#[derive(Clone, Debug)]
pub struct EncryptedResult {
    pub(crate) ctxt: Option<Ciphertext>,
    pub(crate) dim: usize,
}

impl EncryptedResult {
    pub fn empty(dim: usize) -> Self {
        Self { ctxt: None, dim }
    }

    pub fn ciphertext(&self) -> Option<&Ciphertext> {
        self.ctxt.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

pub fn decrypt_result(
    ctx: &CkksContext,
    r: &EncryptedResult,
    keys: &KeyBundle,
) -> Result<DenseMatrix> {
    let n = r.dim;
    match &r.ctxt {
        None => Ok(DenseMatrix::zeros(n)),
        Some(ct) => {
            let slots = ctx.decrypt_values(ct, keys)?;
            DenseMatrix::new(n, slots[..n * n].to_vec())
        }
    }
}

/// Every nonzero rotation step, normalised into `[1, slots)`, that a
/// multiplication of `a` by `b` can request: for each `(i, j, l)` with
/// `A(i,l)` and `B(l,j)` both packed, the alignment step `|a_pos - b_pos|`
/// and the accumulation step `min_pos - (i N + j)`.
///
/// Works by brute force over all index triples rather than by replaying
/// the engine's merge.
pub fn required_rotation_steps(
    a: &SparseMeta,
    b: &SparseMeta,
    slots: usize,
) -> Result<BTreeSet<i64>> {
    let n = a.dim();
    if b.dim() != n {
        return Err(Error::DimensionMismatch {
            left: n,
            right: b.dim(),
        });
    }
    let position_map = |m: &SparseMeta| {
        let mut pos = vec![None; n * n];
        for (r, c, p) in m.entries() {
            pos[r * n + c] = Some(p as i64);
        }
        pos
    };
    let (pa, pb) = (position_map(a), position_map(b));
    let slots = slots as i64;
    let mut steps = BTreeSet::new();
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                let (Some(ap), Some(bp)) = (pa[i * n + l], pb[l * n + j]) else {
                    continue;
                };
                let target = (i * n + j) as i64;
                for step in [(ap - bp).abs(), ap.min(bp) - target] {
                    let s = step.rem_euclid(slots);
                    if s != 0 {
                        steps.insert(s);
                    }
                }
            }
        }
    }
    Ok(steps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn capacity_rule() {
        assert!(check_capacity(16, 512).is_ok());
        assert!(matches!(
            check_capacity(17, 512),
            Err(Error::CapacityExceeded {
                dim: 17,
                slots: 512
            })
        ));
        assert!(check_capacity(80, 4096).is_err());
    }

    #[test]
    fn empty_and_single_entry_steps() {
        let zero = DenseMatrix::zeros(4);
        let (_, a) = pack(&zero, Layout::Csr).unwrap();
        let (_, b) = pack(&zero, Layout::Csc).unwrap();
        assert!(required_rotation_steps(&a, &b, 512).unwrap().is_empty());

        let mut one = DenseMatrix::zeros(4);
        one.set(0, 0, 2.0);
        let (_, a) = pack(&one, Layout::Csr).unwrap();
        let (_, b) = pack(&one, Layout::Csc).unwrap();
        assert!(required_rotation_steps(&a, &b, 512).unwrap().is_empty());
    }

    #[test]
    fn hand_traced_steps() {
        // A has (0,1) at slot 0; B has (1,0) at slot 0 and (1,1) at slot 1
        let mut a = DenseMatrix::zeros(2);
        a.set(0, 1, 1.0);
        let mut b = DenseMatrix::zeros(2);
        b.set(1, 0, 1.0);
        b.set(1, 1, 1.0);
        let (_, ma) = pack(&a, Layout::Csr).unwrap();
        let (_, mb) = pack(&b, Layout::Csc).unwrap();
        // pair (0,0): positions 0 and 0, target 0 -> nothing
        // pair (0,1): positions 0 and 1 -> align 1, min 0, target 1 -> -1
        let steps = required_rotation_steps(&ma, &mb, 8).unwrap();
        assert_eq!(steps.into_iter().collect::<Vec<_>>(), vec![1, 7]);
        let (_, wrong) = pack(&DenseMatrix::zeros(3), Layout::Csc).unwrap();
        assert!(required_rotation_steps(&ma, &wrong, 8).is_err());
    }
}
