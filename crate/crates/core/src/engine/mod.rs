//! Encrypted sparse x sparse multiplication.
//!
//! Every method reduces to a list of scalar products (see [`schedule`]).
//! For each product the operand at the larger slot position is rotated onto
//! the other, the two ciphertexts are multiplied, a one-hot mask isolates
//! the product at `min_pos`, and the result is rotated to its row-major
//! output slot and added into the accumulator.

mod schedule;

use std::collections::HashMap;
use std::time::{Duration, Instant};

pub use schedule::{schedule, MatmulMethod, PairStep, SkipRule};

use crate::ckks::{Ciphertext, CkksContext, HoistedCiphertext, KeyBundle, Plaintext};
use crate::enc::{EncryptedResult, EncryptedSparseMatrix};
use crate::{Error, Result};

/// Primitive operations performed during one multiplication.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OpCounter {
    pub ct_ct_mults: u64,
    pub pt_mults: u64,
    /// `align_rotations + accum_rotations`
    pub rotations: u64,
    pub align_rotations: u64,
    pub accum_rotations: u64,
    /// Genuine relinearizations (each a key switch).
    pub relins: u64,
    /// Relinearizations of degree-1 ciphertexts, which change nothing.
    pub relin_noops: u64,
    pub rescales: u64,
    pub adds: u64,
    /// Plaintext encodings inside the timed region.
    pub encodes: u64,
    pub wall_time: Duration,
}

impl OpCounter {
    /// Equality of all counts, ignoring wall time.
    pub fn same_counts(&self, other: &Self) -> bool {
        Self {
            wall_time: Duration::ZERO,
            ..self.clone()
        } == Self {
            wall_time: Duration::ZERO,
            ..other.clone()
        }
    }

    /// True when every count is at most the matching count of `other`.
    pub fn dominated_by(&self, other: &Self) -> bool {
        let (a, b) = (self.counts(), other.counts());
        a.iter().zip(&b).all(|(x, y)| x.1 <= y.1)
    }

    /// `(name, value)` for every count, in a fixed order.
    pub fn counts(&self) -> [(&'static str, u64); 10] {
        [
            ("ct_ct_mults", self.ct_ct_mults),
            ("pt_mults", self.pt_mults),
            ("rotations", self.rotations),
            ("align_rotations", self.align_rotations),
            ("accum_rotations", self.accum_rotations),
            ("relins", self.relins),
            ("relin_noops", self.relin_noops),
            ("rescales", self.rescales),
            ("adds", self.adds),
            ("encodes", self.encodes),
        ]
    }
}

/// Rotations issued for one scalar product, as normalised steps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairTrace {
    pub pair: PairStep,
    pub align_steps: Vec<i64>,
    pub accum_steps: Vec<i64>,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct EngineOptions {
    pub skip_rule: SkipRule,
    /// Record a [`PairTrace`] per scalar product.
    pub trace: bool,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub result: EncryptedResult,
    pub counter: OpCounter,
    pub trace: Option<Vec<PairTrace>>,
}

/// One-hot masks keyed by slot, encoded at level `top - 1` with scale equal
/// to `q_{top-1}` so the following rescale restores the product's scale.
#[derive(Debug)]
pub struct MaskCache {
    dim: usize,
    level: usize,
    scale: f64,
    masks: HashMap<usize, Plaintext>,
}

impl MaskCache {
    pub fn new(ctx: &CkksContext, dim: usize) -> Result<Self> {
        let top = ctx.top_level();
        if top < 2 {
            return Err(Error::InsufficientDepth { levels: top });
        }
        let level = top - 1;
        let scale = ctx.params().modulus_chain[level] as f64;
        Ok(Self {
            dim,
            level,
            scale,
            masks: HashMap::new(),
        })
    }

    fn encode(&self, ctx: &CkksContext, pos: usize) -> Result<Plaintext> {
        let mut v = vec![0.0; self.dim * self.dim];
        v[pos] = 1.0;
        ctx.encode(&v, self.scale, self.level)
    }

    /// Encodes the masks for every position not yet cached.
    pub fn prepare(
        &mut self,
        ctx: &CkksContext,
        positions: impl IntoIterator<Item = usize>,
    ) -> Result<()> {
        for pos in positions {
            if !self.masks.contains_key(&pos) {
                let pt = self.encode(ctx, pos)?;
                self.masks.insert(pos, pt);
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }
}

/// Accumulator adopting the first summand and checking that every later
/// one sits at the same level and scale.
struct Accumulator {
    ct: Option<Ciphertext>,
    level: usize,
}

impl Accumulator {
    fn add(
        &mut self,
        ctx: &CkksContext,
        summand: Ciphertext,
        counter: &mut OpCounter,
    ) -> Result<()> {
        if summand.level() != self.level {
            return Err(Error::LevelMismatch {
                left: self.level,
                right: summand.level(),
            });
        }
        match &self.ct {
            None => self.ct = Some(summand),
            Some(acc) => {
                if acc.scale() != summand.scale() {
                    return Err(Error::ScaleMismatch {
                        left: acc.scale(),
                        right: summand.scale(),
                    });
                }
                self.ct = Some(ctx.add(acc, &summand)?);
                counter.adds += 1;
            }
        }
        Ok(())
    }
}

pub struct SpmmEngine<'a> {
    ctx: &'a CkksContext,
    keys: &'a KeyBundle,
    options: EngineOptions,
}

impl<'a> SpmmEngine<'a> {
    pub fn new(ctx: &'a CkksContext, keys: &'a KeyBundle) -> Self {
        Self {
            ctx,
            keys,
            options: EngineOptions::default(),
        }
    }

    pub fn with_options(mut self, options: EngineOptions) -> Self {
        self.options = options;
        self
    }

    /// Runs `method` on `a * b`. Mask encoding happens before the timer
    /// starts; everything after, including operand decomposition, is timed.
    pub fn multiply(
        &self,
        method: MatmulMethod,
        a: &EncryptedSparseMatrix,
        b: &EncryptedSparseMatrix,
    ) -> Result<RunOutput> {
        let n = a.dim();
        let pairs = schedule(method, &a.meta, &b.meta, self.options.skip_rule)?;
        let mut masks = MaskCache::new(self.ctx, n)?;
        masks.prepare(self.ctx, pairs.iter().map(PairStep::min_pos))?;

        let mut counter = OpCounter::default();
        let mut trace = self.options.trace.then(Vec::new);
        let start = Instant::now();
        let mut acc = Accumulator {
            ct: None,
            level: self.ctx.top_level() - 2,
        };
        if !pairs.is_empty() {
            let ha = self.ctx.hoist(&a.ctxt)?;
            let hb = self.ctx.hoist(&b.ctxt)?;
            for pair in &pairs {
                let t = self.pair(&ha, &hb, pair, n, &mut masks, &mut acc, &mut counter)?;
                if let Some(trace) = trace.as_mut() {
                    trace.push(t);
                }
            }
        }
        counter.wall_time = start.elapsed();
        Ok(RunOutput {
            result: EncryptedResult {
                ctxt: acc.ct,
                dim: n,
            },
            counter,
            trace,
        })
    }

    #[allow(clippy::too_many_arguments)]
    fn pair(
        &self,
        ha: &HoistedCiphertext,
        hb: &HoistedCiphertext,
        pair: &PairStep,
        n: usize,
        masks: &mut MaskCache,
        acc: &mut Accumulator,
        counter: &mut OpCounter,
    ) -> Result<PairTrace> {
        let mut align_steps = Vec::new();
        let step = pair.align_step();
        let rotated;
        let (va, vb) = if pair.a_pos > pair.b_pos {
            rotated = self.ctx.rotate_hoisted(ha, step, self.keys)?;
            (&rotated, hb.ciphertext())
        } else if pair.b_pos > pair.a_pos {
            rotated = self.ctx.rotate_hoisted(hb, step, self.keys)?;
            (ha.ciphertext(), &rotated)
        } else {
            (ha.ciphertext(), hb.ciphertext())
        };
        if step != 0 {
            counter.rotations += 1;
            counter.align_rotations += 1;
            align_steps.push(self.ctx.normalize_step(step) as i64);
        }
        let accum_steps = self.step(
            va,
            vb,
            pair.min_pos(),
            pair.i,
            pair.j,
            n,
            masks,
            acc,
            counter,
        )?;
        Ok(PairTrace {
            pair: *pair,
            align_steps,
            accum_steps,
        })
    }

    /// Multiplies aligned operands, isolates slot `min_pos`, moves it to
    /// slot `i n + j` and adds it into the accumulator. Returns the
    /// normalised rotation steps it issued.
    #[allow(clippy::too_many_arguments)]
    fn step(
        &self,
        va: &Ciphertext,
        vb: &Ciphertext,
        min_pos: usize,
        i: usize,
        j: usize,
        n: usize,
        masks: &mut MaskCache,
        acc: &mut Accumulator,
        counter: &mut OpCounter,
    ) -> Result<Vec<i64>> {
        let ctx = self.ctx;
        let prod = ctx.mul(va, vb)?;
        counter.ct_ct_mults += 1;
        let prod = ctx.relinearize(&prod, self.keys)?;
        counter.relins += 1;
        let prod = ctx.rescale(&prod)?;
        counter.rescales += 1;

        if !masks.masks.contains_key(&min_pos) {
            counter.encodes += 1;
            masks.prepare(ctx, [min_pos])?;
        }
        let prod = ctx.mul_plain(&prod, &masks.masks[&min_pos])?;
        counter.pt_mults += 1;
        let prod = ctx.relinearize(&prod, self.keys)?;
        counter.relin_noops += 1;
        let prod = ctx.rescale(&prod)?;
        counter.rescales += 1;

        let rot_idx = min_pos as i64 - (i * n + j) as i64;
        let norm = ctx.normalize_step(rot_idx);
        let mut steps = Vec::new();
        let prod = if norm != 0 {
            counter.rotations += 1;
            counter.accum_rotations += 1;
            steps.push(norm as i64);
            ctx.rotate(&prod, rot_idx, self.keys)?
        } else {
            prod
        };
        acc.add(ctx, prod, counter)?;
        Ok(steps)
    }

    /// A single product step on already aligned operands, for callers that
    /// drive the pipeline themselves.
    #[allow(clippy::too_many_arguments)]
    pub fn fhe_spmspm_step(
        &self,
        va: &Ciphertext,
        vb: &Ciphertext,
        min_pos: usize,
        i: usize,
        j: usize,
        result: &mut EncryptedResult,
        counter: &mut OpCounter,
    ) -> Result<()> {
        let n = result.dim;
        let mut masks = MaskCache::new(self.ctx, n)?;
        masks.prepare(self.ctx, [min_pos])?;
        let mut acc = Accumulator {
            ct: result.ctxt.take(),
            level: self.ctx.top_level() - 2,
        };
        let out = self.step(va, vb, min_pos, i, j, n, &mut masks, &mut acc, counter);
        result.ctxt = acc.ct;
        out.map(|_| ())
    }

    pub fn spmm_csr_csc(
        &self,
        a: &EncryptedSparseMatrix,
        b: &EncryptedSparseMatrix,
    ) -> Result<RunOutput> {
        self.multiply(MatmulMethod::CsrC, a, b)
    }

    pub fn spmm_vcsr(
        &self,
        a: &EncryptedSparseMatrix,
        b: &EncryptedSparseMatrix,
    ) -> Result<RunOutput> {
        self.multiply(MatmulMethod::VcsrC, a, b)
    }

    pub fn matmul_naive_dense(
        &self,
        a: &EncryptedSparseMatrix,
        b: &EncryptedSparseMatrix,
    ) -> Result<RunOutput> {
        self.multiply(MatmulMethod::NaiveDense, a, b)
    }

    pub fn matmul_naive_sparse(
        &self,
        a: &EncryptedSparseMatrix,
        b: &EncryptedSparseMatrix,
    ) -> Result<RunOutput> {
        self.multiply(MatmulMethod::NaiveSparse, a, b)
    }
}
