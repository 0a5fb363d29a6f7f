use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::DenseMatrix;
use crate::{Error, Result};

/// Number of zero entries for a sparsity fraction, rounding halves up.
pub fn zero_count(dim: usize, sparsity: f64) -> Result<usize> {
    if !(0.0..=1.0).contains(&sparsity) {
        return Err(Error::InvalidSparsity(sparsity));
    }
    let total = (dim * dim) as f64;
    Ok(((sparsity * total + 0.5).floor() as usize).min(dim * dim))
}

fn nonzero_uniform(rng: &mut impl Rng) -> f64 {
    loop {
        let v = rng.gen_range(-1.0..1.0);
        if v != 0.0 {
            return v;
        }
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::InvalidMatrix("dimension must be at least 1".into()));
    }
    Ok(())
}

/// Random `dim x dim` matrix with exactly `zero_count(dim, sparsity)` zeros
/// at uniformly chosen positions; the other entries are uniform in
/// `[-1, 1)` and never zero.
pub fn generate_random_sparse(dim: usize, sparsity: f64, seed: u64) -> Result<DenseMatrix> {
    check_dim(dim)?;
    let zeros = zero_count(dim, sparsity)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut values: Vec<f64> = (0..dim * dim).map(|_| nonzero_uniform(&mut rng)).collect();
    for p in index::sample(&mut rng, dim * dim, zeros) {
        values[p] = 0.0;
    }
    DenseMatrix::new(dim, values)
}

/// One matrix per sparsity level, all zeroing prefixes of the same random
/// position order, so a sparser member's zeros include every zero of a
/// denser one.
pub fn generate_nested_family(
    dim: usize,
    sparsities: &[f64],
    seed: u64,
) -> Result<Vec<DenseMatrix>> {
    check_dim(dim)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let base: Vec<f64> = (0..dim * dim).map(|_| nonzero_uniform(&mut rng)).collect();
    let order = index::sample(&mut rng, dim * dim, dim * dim).into_vec();
    sparsities
        .iter()
        .map(|&s| {
            let mut values = base.clone();
            for &p in &order[..zero_count(dim, s)?] {
                values[p] = 0.0;
            }
            DenseMatrix::new(dim, values)
        })
        .collect()
}
