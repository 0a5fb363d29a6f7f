//! Sparsity sweeps. Every `(N, sparsity)` cell owns one operand pair that
//! all methods and repetitions share; runs are independent and may execute
//! on a worker pool, with results collected in a fixed order.

use std::collections::BTreeSet;

use anyhow::Context;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use sparsefhe_core::enc::{pack, required_rotation_steps};
use sparsefhe_core::engine::PairTrace;
use sparsefhe_core::sparse::generate_nested_family;
use sparsefhe_core::{
    decrypt_result, encrypt_sparse, frobenius_error, plain_matmul, CkksContext, CkksParams,
    DenseMatrix, EngineOptions, KeyBundle, MatmulMethod, OpCounter, RunOutput, SpmmEngine,
};

use crate::config::{matrix_pair, sub_seed, BenchConfig};
use crate::record::BenchRecord;

const NESTED_TAG: u64 = 0x6e65_7374;

/// A context with keys; Galois keys are added on demand.
pub struct Harness {
    ctx: CkksContext,
    keys: KeyBundle,
}

impl Harness {
    pub fn new(params: CkksParams) -> anyhow::Result<Self> {
        let ctx = CkksContext::new(params)?;
        let keys = ctx.keygen()?;
        Ok(Self { ctx, keys })
    }

    pub fn ctx(&self) -> &CkksContext {
        &self.ctx
    }

    pub fn keys(&self) -> &KeyBundle {
        &self.keys
    }

    /// Generates the rotation keys `method` needs on `a * b`.
    pub fn prepare(
        &mut self,
        a: &DenseMatrix,
        b: &DenseMatrix,
        methods: &[MatmulMethod],
        slice_height: usize,
    ) -> anyhow::Result<()> {
        let mut steps = BTreeSet::new();
        for &m in methods {
            steps.extend(rotation_steps(&self.ctx, a, b, m, slice_height)?);
        }
        self.ctx.gen_galois_keys(&mut self.keys, steps)?;
        Ok(())
    }

    /// Encrypts `a` and `b` in the layouts of `method`, multiplies, and
    /// decrypts. Only the multiplication is timed.
    pub fn run(
        &self,
        method: MatmulMethod,
        a: &DenseMatrix,
        b: &DenseMatrix,
        options: EngineOptions,
        slice_height: usize,
        rng_seed: u64,
    ) -> anyhow::Result<(DenseMatrix, RunOutput)> {
        let mut rng = ChaCha20Rng::seed_from_u64(rng_seed);
        let (la, lb) = method.layouts(slice_height);
        let ea = encrypt_sparse(&self.ctx, a, la, &self.keys, &mut rng)?;
        let eb = encrypt_sparse(&self.ctx, b, lb, &self.keys, &mut rng)?;
        let out = SpmmEngine::new(&self.ctx, &self.keys)
            .with_options(options)
            .multiply(method, &ea, &eb)?;
        let product = decrypt_result(&self.ctx, &out.result, &self.keys)?;
        Ok((product, out))
    }
}

fn rotation_steps(
    ctx: &CkksContext,
    a: &DenseMatrix,
    b: &DenseMatrix,
    method: MatmulMethod,
    slice_height: usize,
) -> anyhow::Result<BTreeSet<i64>> {
    let (la, lb) = method.layouts(slice_height);
    let (_, ma) = pack(a, la)?;
    let (_, mb) = pack(b, lb)?;
    Ok(required_rotation_steps(&ma, &mb, ctx.slots())?)
}

/// Operands and oracle product for one `(N, sparsity)` cell.
#[derive(Clone, Debug)]
pub struct Cell {
    pub n: usize,
    pub sparsity: f64,
    pub seed: u64,
    pub a: DenseMatrix,
    pub b: DenseMatrix,
    pub expected: DenseMatrix,
}

/// Draws the operands of every cell, in `sizes x sparsities` order.
pub fn prepare_cells(config: &BenchConfig) -> anyhow::Result<Vec<Cell>> {
    let mut cells = Vec::new();
    for &n in &config.sizes {
        let pairs: Vec<(u64, DenseMatrix, DenseMatrix)> = if config.nested {
            let seed = sub_seed(config.seed, &[n as u64, NESTED_TAG]);
            let fa = generate_nested_family(n, &config.sparsities, sub_seed(seed, &[0]))?;
            let fb = generate_nested_family(n, &config.sparsities, sub_seed(seed, &[1]))?;
            fa.into_iter().zip(fb).map(|(a, b)| (seed, a, b)).collect()
        } else {
            config
                .sparsities
                .iter()
                .map(|&s| {
                    let seed = sub_seed(config.seed, &[n as u64, s.to_bits()]);
                    let (a, b) = matrix_pair(n, s, seed)?;
                    Ok((seed, a, b))
                })
                .collect::<sparsefhe_core::Result<_>>()?
        };
        for (&sparsity, (seed, a, b)) in config.sparsities.iter().zip(pairs) {
            let expected = plain_matmul(&a, &b)?;
            cells.push(Cell {
                n,
                sparsity,
                seed,
                a,
                b,
                expected,
            });
        }
    }
    Ok(cells)
}

/// A finished run: its CSV row plus the raw counters and decrypted product.
#[derive(Clone, Debug)]
pub struct RunResult {
    pub record: BenchRecord,
    pub counter: OpCounter,
    pub product: DenseMatrix,
    /// Present when [`BenchConfig::trace`] is set.
    pub trace: Option<Vec<PairTrace>>,
}

/// Runs every `(N, sparsity, method, rep)` combination of `config`. Rows are
/// ordered by size, sparsity, method and repetition regardless of `jobs`.
pub fn run_sweep(harness: &mut Harness, config: &BenchConfig) -> anyhow::Result<Vec<RunResult>> {
    config.validate()?;
    let cells = prepare_cells(config)?;
    for cell in &cells {
        harness.prepare(&cell.a, &cell.b, &config.methods, config.slice_height)?;
    }

    let mut jobs = Vec::with_capacity(config.row_count());
    for cell in &cells {
        for (mi, &method) in config.methods.iter().enumerate() {
            for rep in 1..=config.reps {
                jobs.push((cell, mi, method, rep));
            }
        }
    }
    let options = EngineOptions {
        skip_rule: config.skip_rule,
        trace: config.trace,
    };
    let harness = &*harness;
    let run = |&(cell, mi, method, rep): &(&Cell, usize, MatmulMethod, u32)| -> anyhow::Result<RunResult> {
        let rng_seed = sub_seed(cell.seed, &[cell.sparsity.to_bits(), mi as u64, rep as u64]);
        let (product, out) = harness
            .run(method, &cell.a, &cell.b, options, config.slice_height, rng_seed)
            .with_context(|| format!("{method} at N={} sparsity={}", cell.n, cell.sparsity))?;
        let err = frobenius_error(&product, &cell.expected)?;
        let record = BenchRecord::new(method, cell.n, cell.sparsity, rep, &out.counter, err, cell.seed);
        Ok(RunResult { record, counter: out.counter, product, trace: out.trace })
    };

    if config.jobs == 1 {
        jobs.iter().map(run).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.jobs)
            .build()?;
        pool.install(|| jobs.par_iter().map(run).collect())
    }
}
