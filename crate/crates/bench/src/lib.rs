//! Shared fixtures for the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sparsefhe_core::enc::{pack, required_rotation_steps};
use sparsefhe_core::sparse::{generate_random_sparse, DEFAULT_SLICE_HEIGHT};
use sparsefhe_core::{
    encrypt_sparse, Ciphertext, CkksContext, CkksParams, EncryptedSparseMatrix, KeyBundle,
    MatmulMethod,
};

/// Default context with relinearization keys and the given rotation steps.
pub fn context_with_steps(steps: impl IntoIterator<Item = i64>) -> (CkksContext, KeyBundle) {
    let ctx = CkksContext::new(CkksParams::default()).expect("default parameters");
    let mut keys = ctx.keygen().expect("keygen");
    ctx.gen_galois_keys(&mut keys, steps).expect("galois keys");
    (ctx, keys)
}

/// A fresh encryption of uniform values in `[-1, 1)` in every slot.
pub fn random_ciphertext(ctx: &CkksContext, keys: &KeyBundle, seed: u64) -> Ciphertext {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let values: Vec<f64> = (0..ctx.slots()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let pt = ctx
        .encode(&values, ctx.params().default_scale(), ctx.top_level())
        .expect("encode");
    ctx.encrypt(&pt, keys, &mut rng).expect("encrypt")
}

/// Encrypted operands for `method` on a random pair of `dim x dim`
/// matrices, with every rotation key the multiplication needs.
pub struct SpmmFixture {
    pub ctx: CkksContext,
    pub keys: KeyBundle,
    pub a: EncryptedSparseMatrix,
    pub b: EncryptedSparseMatrix,
}

impl SpmmFixture {
    pub fn new(method: MatmulMethod, dim: usize, sparsity: f64, seed: u64) -> Self {
        let ma = generate_random_sparse(dim, sparsity, seed).expect("matrix");
        let mb = generate_random_sparse(dim, sparsity, seed + 1).expect("matrix");
        let (la, lb) = method.layouts(DEFAULT_SLICE_HEIGHT);
        let (_, meta_a) = pack(&ma, la).expect("pack");
        let (_, meta_b) = pack(&mb, lb).expect("pack");
        let slots = CkksParams::default().slots();
        let steps = required_rotation_steps(&meta_a, &meta_b, slots).expect("steps");
        let (ctx, keys) = context_with_steps(steps);
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let a = encrypt_sparse(&ctx, &ma, la, &keys, &mut rng).expect("encrypt");
        let b = encrypt_sparse(&ctx, &mb, lb, &keys, &mut rng).expect("encrypt");
        Self { ctx, keys, a, b }
    }
}
