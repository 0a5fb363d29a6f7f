//! Key generation. All randomness derives from `CkksParams::seed`, with a
//! separate ChaCha stream per key so that Galois keys do not depend on the
//! order in which they are requested.

use std::collections::BTreeMap;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::context::CkksContext;
use super::poly::RnsPoly;
use crate::{Error, Result};

const STREAM_SECRET: u64 = 1;
const STREAM_PUBLIC: u64 = 2;
const STREAM_RELIN: u64 = 3;
const STREAM_GALOIS_BASE: u64 = 1 << 32;

/// Ternary secret, kept both as coefficients and in NTT form over every
/// modulus including the auxiliary prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecretKey {
    pub(crate) coeffs: Vec<i8>,
    pub(crate) ntt: RnsPoly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PublicKey {
    pub(crate) b: RnsPoly,
    pub(crate) a: RnsPoly,
}

/// Key-switching material from some `s'` to the secret `s`: one
/// `(b_i, a_i)` pair per chain prime, each over the chain plus the
/// auxiliary prime, with `b_i = -a_i s + e_i + g_i s'` where the gadget
/// `g_i` is `P` in limb `i` and zero elsewhere.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeySwitchKey {
    pub(crate) digits: Vec<(RnsPoly, RnsPoly)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeyBundle {
    pub(crate) secret_key: SecretKey,
    pub(crate) public_key: PublicKey,
    pub(crate) relin_key: Option<KeySwitchKey>,
    /// Keyed by normalised rotation step in `[1, slots)`.
    pub(crate) galois_keys: BTreeMap<usize, KeySwitchKey>,
}

impl KeyBundle {
    pub fn secret_key(&self) -> &SecretKey {
        &self.secret_key
    }

    pub fn has_relin_key(&self) -> bool {
        self.relin_key.is_some()
    }

    pub fn without_relin_key(mut self) -> Self {
        self.relin_key = None;
        self
    }

    /// Normalised steps with a Galois key.
    pub fn galois_steps(&self) -> impl Iterator<Item = usize> + '_ {
        self.galois_keys.keys().copied()
    }

    pub fn has_galois_key(&self, step: usize) -> bool {
        self.galois_keys.contains_key(&step)
    }
}

pub(crate) fn sample_ternary(rng: &mut impl Rng, n: usize) -> Vec<i64> {
    (0..n).map(|_| rng.gen_range(-1i64..=1)).collect()
}

/// Centered binomial noise with eta = 21 (standard deviation about 3.24).
pub(crate) fn sample_error(rng: &mut impl RngCore, n: usize) -> Vec<i64> {
    const MASK: u64 = (1 << 21) - 1;
    (0..n)
        .map(|_| {
            let x = rng.next_u64();
            (x & MASK).count_ones() as i64 - ((x >> 21) & MASK).count_ones() as i64
        })
        .collect()
}

impl CkksContext {
    fn stream_rng(&self, stream: u64) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.params().seed);
        rng.set_stream(stream);
        rng
    }

    /// Uniform polynomial directly in NTT form over the given modulus indices.
    pub(crate) fn sample_uniform(&self, rng: &mut impl Rng, indices: &[usize]) -> RnsPoly {
        let n = self.ring_degree();
        RnsPoly::from_limbs(
            indices
                .iter()
                .map(|&i| {
                    let q = self.moduli[i].value();
                    (0..n).map(|_| rng.gen_range(0..q)).collect()
                })
                .collect(),
        )
    }

    /// Generates the secret, public and relinearization keys. No Galois keys
    /// are produced here; see [`CkksContext::gen_galois_keys`].
    pub fn keygen(&self) -> Result<KeyBundle> {
        self.params().validate()?;
        let n = self.ring_degree();
        let all: Vec<usize> = (0..self.moduli.len()).collect();

        let mut rng = self.stream_rng(STREAM_SECRET);
        let s = sample_ternary(&mut rng, n);
        let secret_key = SecretKey {
            coeffs: s.iter().map(|&c| c as i8).collect(),
            ntt: self.poly_from_signed(&s, all.iter().copied()),
        };

        let chain: Vec<usize> = (0..=self.top_level()).collect();
        let chain_moduli = self.chain_moduli(self.top_level());
        let mut rng = self.stream_rng(STREAM_PUBLIC);
        let a = self.sample_uniform(&mut rng, &chain);
        let e = sample_error(&mut rng, n);
        let mut b = self.poly_from_signed(&e, chain.iter().copied());
        let mut as_ = a.mul(&secret_key.ntt, chain_moduli);
        as_.neg_assign(chain_moduli);
        b.add_assign(&as_, chain_moduli);
        let public_key = PublicKey { b, a };

        let s_sq = secret_key.ntt.mul(&secret_key.ntt, &self.moduli);
        let mut rng = self.stream_rng(STREAM_RELIN);
        let relin_key = self.gen_switch_key(&s_sq, &secret_key, &mut rng);

        Ok(KeyBundle {
            secret_key,
            public_key,
            relin_key: Some(relin_key),
            galois_keys: BTreeMap::new(),
        })
    }

    /// Key-switching key from `from` (NTT form over all moduli) to `sk`.
    pub(crate) fn gen_switch_key(
        &self,
        from: &RnsPoly,
        sk: &SecretKey,
        rng: &mut impl Rng,
    ) -> KeySwitchKey {
        let n = self.ring_degree();
        let all: Vec<usize> = (0..self.moduli.len()).collect();
        let digits = (0..=self.top_level())
            .map(|i| {
                let a = self.sample_uniform(rng, &all);
                let e = sample_error(rng, n);
                let mut b = self.poly_from_signed(&e, all.iter().copied());
                let mut as_ = a.mul(&sk.ntt, &self.moduli);
                as_.neg_assign(&self.moduli);
                b.add_assign(&as_, &self.moduli);
                let q = &self.moduli[i];
                let p = self.aux_mod_q[i];
                for (x, f) in b.limbs[i].iter_mut().zip(&from.limbs[i]) {
                    *x = q.add(*x, q.mul(p, *f));
                }
                (b, a)
            })
            .collect();
        KeySwitchKey { digits }
    }

    /// Adds Galois keys for each requested rotation step. Steps are
    /// normalised into `[1, slots)`; keys already present are kept.
    pub fn gen_galois_keys(
        &self,
        keys: &mut KeyBundle,
        steps: impl IntoIterator<Item = i64>,
    ) -> Result<()> {
        let slots = self.slots() as i64;
        for step in steps {
            if step == 0 || step.abs() >= slots {
                return Err(Error::InvalidRotation {
                    step,
                    slots: slots as usize,
                });
            }
            let norm = self.normalize_step(step);
            if keys.galois_keys.contains_key(&norm) {
                continue;
            }
            let rotated_secret = keys.secret_key.ntt.permute(self.rotation_permutation(norm));
            let mut rng = self.stream_rng(STREAM_GALOIS_BASE + norm as u64);
            let key = self.gen_switch_key(&rotated_secret, &keys.secret_key, &mut rng);
            keys.galois_keys.insert(norm, key);
        }
        Ok(())
    }
}
