use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::OnceLock;

use num_bigint::BigUint;

use super::arith::Modulus;
use super::encoding::SlotEncoder;
use super::ntt::{bit_reverse, NttTable};
use super::params::CkksParams;
use super::poly::RnsPoly;
use crate::{Error, Result};

/// Counters maintained by the evaluator across all operations.
#[derive(Debug, Default)]
pub struct EvalStats {
    key_switches: AtomicU64,
    relin_noops: AtomicU64,
}

impl EvalStats {
    pub fn key_switches(&self) -> u64 {
        self.key_switches.load(Ordering::Relaxed)
    }

    pub fn relin_noops(&self) -> u64 {
        self.relin_noops.load(Ordering::Relaxed)
    }

    pub(crate) fn record_key_switch(&self) {
        self.key_switches.fetch_add(1, Ordering::Relaxed);
    }

    pub(crate) fn record_relin_noop(&self) {
        self.relin_noops.fetch_add(1, Ordering::Relaxed);
    }
}

/// CRT reconstruction data for one level.
#[derive(Debug)]
pub(crate) struct CrtBasis {
    pub(crate) product: BigUint,
    pub(crate) half: BigUint,
    pub(crate) lifts: Vec<BigUint>,
}

/// Precomputed tables for one parameter set. Cheap to share by reference
/// across threads; every evaluation method takes `&self`.
#[derive(Debug)]
pub struct CkksContext {
    params: CkksParams,
    /// Chain primes `q_0..q_L` followed by the auxiliary prime.
    pub(crate) moduli: Vec<Modulus>,
    pub(crate) tables: Vec<NttTable>,
    pub(crate) encoder: SlotEncoder,
    pub(crate) crt: Vec<CrtBasis>,
    /// `rescale_inv[l][j] = q_l^{-1} mod q_j` for `j < l`.
    pub(crate) rescale_inv: Vec<Vec<u64>>,
    /// `P mod q_j`.
    pub(crate) aux_mod_q: Vec<u64>,
    /// `P^{-1} mod q_j`.
    pub(crate) aux_inv: Vec<u64>,
    pub(crate) stats: EvalStats,
    rotation_perms: Vec<OnceLock<Vec<usize>>>,
}

impl CkksContext {
    pub fn new(params: CkksParams) -> Result<Self> {
        params.validate()?;
        let n = params.ring_degree;
        let moduli: Vec<Modulus> = params
            .modulus_chain
            .iter()
            .chain(std::iter::once(&params.aux_modulus))
            .map(|&q| Modulus::new(q))
            .collect();
        let tables = moduli
            .iter()
            .map(|&q| NttTable::new(q, n).ok_or(Error::NotNttFriendly(q.value())))
            .collect::<Result<Vec<_>>>()?;
        let chain = &moduli[..params.modulus_chain.len()];

        let mut crt = Vec::with_capacity(chain.len());
        for level in 0..chain.len() {
            let product = chain[..=level]
                .iter()
                .fold(BigUint::from(1u32), |acc, q| acc * q.value());
            let lifts = chain[..=level]
                .iter()
                .map(|q| {
                    let hat = &product / q.value();
                    let hat_mod = (&hat % q.value())
                        .to_u64_digits()
                        .first()
                        .copied()
                        .unwrap_or(0);
                    let inv = q.inv(hat_mod).expect("distinct primes");
                    hat * inv
                })
                .collect();
            let half = &product >> 1;
            crt.push(CrtBasis {
                product,
                half,
                lifts,
            });
        }

        let rescale_inv = (0..chain.len())
            .map(|l| {
                (0..l)
                    .map(|j| {
                        chain[j]
                            .inv(chain[l].value() % chain[j].value())
                            .expect("distinct primes")
                    })
                    .collect()
            })
            .collect();
        let p = params.aux_modulus;
        let aux_mod_q = chain.iter().map(|q| p % q.value()).collect();
        let aux_inv = chain
            .iter()
            .map(|q| q.inv(p % q.value()).expect("distinct primes"))
            .collect();

        Ok(Self {
            encoder: SlotEncoder::new(n),
            params,
            moduli,
            tables,
            crt,
            rescale_inv,
            aux_mod_q,
            aux_inv,
            stats: EvalStats::default(),
            rotation_perms: (0..n / 2).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn params(&self) -> &CkksParams {
        &self.params
    }

    pub fn stats(&self) -> &EvalStats {
        &self.stats
    }

    pub fn ring_degree(&self) -> usize {
        self.params.ring_degree
    }

    pub fn slots(&self) -> usize {
        self.params.slots()
    }

    pub fn top_level(&self) -> usize {
        self.params.top_level()
    }

    pub(crate) fn aux_index(&self) -> usize {
        self.moduli.len() - 1
    }

    /// Moduli of the ciphertext basis at `level`.
    pub(crate) fn chain_moduli(&self, level: usize) -> &[Modulus] {
        &self.moduli[..=level]
    }

    pub(crate) fn check_level(&self, level: usize) -> Result<()> {
        if level > self.top_level() {
            return Err(Error::LevelOutOfRange {
                level,
                top: self.top_level(),
            });
        }
        Ok(())
    }

    /// Coefficient form of limb `limb` (NTT form) under modulus `idx`,
    /// as centered signed integers.
    pub(crate) fn centered_coeffs(&self, limb: &[u64], idx: usize) -> Vec<i64> {
        let mut tmp = limb.to_vec();
        self.tables[idx].inverse(&mut tmp);
        let q = &self.moduli[idx];
        tmp.into_iter().map(|x| q.center(x)).collect()
    }

    /// NTT form under modulus `idx` of a signed coefficient vector.
    pub(crate) fn ntt_from_signed(&self, coeffs: &[i64], idx: usize) -> Vec<u64> {
        let q = &self.moduli[idx];
        let mut out: Vec<u64> = coeffs.iter().map(|&c| q.reduce_i64(c)).collect();
        self.tables[idx].forward(&mut out);
        out
    }

    /// Lifts signed coefficients to an NTT-form polynomial over the given
    /// modulus indices.
    pub(crate) fn poly_from_signed(
        &self,
        coeffs: &[i64],
        indices: impl Iterator<Item = usize>,
    ) -> RnsPoly {
        RnsPoly::from_limbs(indices.map(|i| self.ntt_from_signed(coeffs, i)).collect())
    }

    /// Galois element `5^step mod 2n` for a normalised rotation step.
    pub fn galois_element(&self, step: usize) -> u64 {
        let two_n = 2 * self.ring_degree() as u64;
        let mut g = 1u64;
        for _ in 0..step {
            g = g * 5 % two_n;
        }
        g
    }

    /// Maps a signed rotation amount into `[0, slots)`.
    pub fn normalize_step(&self, step: i64) -> usize {
        step.rem_euclid(self.slots() as i64) as usize
    }

    /// Cached automorphism permutation for a normalised rotation step.
    pub(crate) fn rotation_permutation(&self, step: usize) -> &[usize] {
        self.rotation_perms[step]
            .get_or_init(|| self.automorphism_permutation(self.galois_element(step)))
    }

    /// Index permutation realising `X -> X^g` on NTT-form limbs.
    pub(crate) fn automorphism_permutation(&self, galois_elt: u64) -> Vec<usize> {
        let n = self.ring_degree();
        let log_n = n.trailing_zeros();
        let mask = 2 * n as u64 - 1;
        (0..n)
            .map(|k| {
                let e = 2 * bit_reverse(k, log_n) as u64 + 1;
                let e2 = (e * galois_elt) & mask;
                bit_reverse(((e2 - 1) / 2) as usize, log_n)
            })
            .collect()
    }

    /// Digit decomposition of `d` (NTT form at `level`): digit `i` is the
    /// centered lift of limb `i`, in NTT form over `q_0..q_level, P`.
    pub(crate) fn decompose(&self, d: &RnsPoly, level: usize) -> Vec<RnsPoly> {
        let aux = self.aux_index();
        (0..=level)
            .map(|digit| {
                let coeffs = self.centered_coeffs(&d.limbs[digit], digit);
                let limbs = (0..=level)
                    .chain(std::iter::once(aux))
                    .map(|idx| {
                        if idx == digit {
                            d.limbs[digit].clone()
                        } else {
                            self.ntt_from_signed(&coeffs, idx)
                        }
                    })
                    .collect();
                RnsPoly::from_limbs(limbs)
            })
            .collect()
    }

    /// Key-switches `d` (NTT form at `level`) using `key`, returning the pair
    /// to be added to `(c0, c1)`. Digits are the RNS limbs of `d`; the
    /// auxiliary prime is divided out at the end.
    pub(crate) fn key_switch(
        &self,
        d: &RnsPoly,
        key: &super::keys::KeySwitchKey,
        level: usize,
    ) -> (RnsPoly, RnsPoly) {
        self.key_switch_digits(&self.decompose(d, level), None, key, level)
    }

    /// Inner product of decomposed digits with `key`, followed by the
    /// division by `P`. When `perm` is given the digits are read through it,
    /// which applies an automorphism to an already decomposed polynomial.
    pub(crate) fn key_switch_digits(
        &self,
        digits: &[RnsPoly],
        perm: Option<&[usize]>,
        key: &super::keys::KeySwitchKey,
        level: usize,
    ) -> (RnsPoly, RnsPoly) {
        let n = self.ring_degree();
        let aux = self.aux_index();
        let basis: Vec<usize> = (0..=level).chain(std::iter::once(aux)).collect();
        let mut acc0 = RnsPoly::zero(n, basis.len());
        let mut acc1 = RnsPoly::zero(n, basis.len());
        let mut scratch = vec![0u64; n];
        let mut wide0 = vec![0u128; n];
        let mut wide1 = vec![0u128; n];
        for (slot, &idx) in basis.iter().enumerate() {
            let q = &self.moduli[idx];
            // products are below 2^124, so up to 16 fit in a u128
            for chunk in digits.chunks(16).zip(key.digits.chunks(16)) {
                wide0.fill(0);
                wide1.fill(0);
                for (dpoly, (kb, ka)) in chunk.0.iter().zip(chunk.1) {
                    let src: &[u64] = match perm {
                        Some(perm) => {
                            let limb = &dpoly.limbs[slot];
                            for (s, &p) in scratch.iter_mut().zip(perm) {
                                *s = limb[p];
                            }
                            &scratch
                        }
                        None => &dpoly.limbs[slot],
                    };
                    let (b, a) = (&kb.limbs[idx], &ka.limbs[idx]);
                    for k in 0..n {
                        wide0[k] += src[k] as u128 * b[k] as u128;
                        wide1[k] += src[k] as u128 * a[k] as u128;
                    }
                }
                let (o0, o1) = (&mut acc0.limbs[slot], &mut acc1.limbs[slot]);
                for k in 0..n {
                    o0[k] = q.add(o0[k], q.reduce_wide(wide0[k]));
                    o1[k] = q.add(o1[k], q.reduce_wide(wide1[k]));
                }
            }
        }
        let out0 = self.mod_down(acc0, level);
        let out1 = self.mod_down(acc1, level);
        self.stats.record_key_switch();
        (out0, out1)
    }

    /// Divides a polynomial over `q_0..q_level, P` by `P` with rounding.
    fn mod_down(&self, mut poly: RnsPoly, level: usize) -> RnsPoly {
        let aux = self.aux_index();
        let top = poly.limbs.pop().expect("aux limb present");
        let coeffs = self.centered_coeffs(&top, aux);
        for j in 0..=level {
            let q = &self.moduli[j];
            let t = self.ntt_from_signed(&coeffs, j);
            let inv = self.aux_inv[j];
            let inv_s = q.shoup(inv);
            for (x, y) in poly.limbs[j].iter_mut().zip(&t) {
                *x = q.mul_shoup(q.sub(*x, *y), inv, inv_s);
            }
        }
        poly
    }

    /// Drops limb `level` from `poly`, dividing by `q_level` with rounding.
    pub(crate) fn drop_last_limb(&self, poly: &mut RnsPoly, level: usize) {
        let last = poly.limbs.pop().expect("limb present");
        let coeffs = self.centered_coeffs(&last, level);
        for j in 0..level {
            let q = &self.moduli[j];
            let t = self.ntt_from_signed(&coeffs, j);
            let inv = self.rescale_inv[level][j];
            let inv_s = q.shoup(inv);
            for (x, y) in poly.limbs[j].iter_mut().zip(&t) {
                *x = q.mul_shoup(q.sub(*x, *y), inv, inv_s);
            }
        }
    }

    /// Centered integer coefficients of an NTT-form polynomial at `level`,
    /// as floats.
    pub(crate) fn reconstruct_coeffs(&self, poly: &RnsPoly, level: usize) -> Vec<f64> {
        if level == 0 {
            return self
                .centered_coeffs(&poly.limbs[0], 0)
                .into_iter()
                .map(|c| c as f64)
                .collect();
        }
        let n = self.ring_degree();
        let coeff_limbs: Vec<Vec<u64>> = (0..=level)
            .map(|i| {
                let mut t = poly.limbs[i].clone();
                self.tables[i].inverse(&mut t);
                t
            })
            .collect();
        let basis = &self.crt[level];
        (0..n)
            .map(|k| {
                let mut x = BigUint::from(0u32);
                for (limb, lift) in coeff_limbs.iter().zip(&basis.lifts) {
                    x += lift * limb[k];
                }
                x %= &basis.product;
                if x > basis.half {
                    -big_to_f64(&(&basis.product - x))
                } else {
                    big_to_f64(&x)
                }
            })
            .collect()
    }
}

fn big_to_f64(x: &BigUint) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::INFINITY)
}
