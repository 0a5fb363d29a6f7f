use rand::Rng;

use super::context::CkksContext;
use super::keys::{sample_error, sample_ternary, KeyBundle};
use super::poly::RnsPoly;
use super::types::{Ciphertext, Plaintext};
use crate::{Error, Result};

/// Relative tolerance for treating two tracked scales as equal.
pub const SCALE_MATCH_TOLERANCE: f64 = 1e-9;

impl CkksContext {
    /// Encrypts under the secret key: `(-a s + e + m, a)`.
    pub fn encrypt(
        &self,
        pt: &Plaintext,
        keys: &KeyBundle,
        rng: &mut impl Rng,
    ) -> Result<Ciphertext> {
        self.check_plaintext(pt)?;
        let level = pt.level;
        let moduli = self.chain_moduli(level);
        let indices: Vec<usize> = (0..=level).collect();
        let a = self.sample_uniform(rng, &indices);
        let e = sample_error(rng, self.ring_degree());
        let mut c0 = self.poly_from_signed(&e, indices.iter().copied());
        c0.add_assign(&pt.poly, moduli);
        let mut as_ = a.mul(&keys.secret_key.ntt, moduli);
        as_.neg_assign(moduli);
        c0.add_assign(&as_, moduli);
        Ok(Ciphertext {
            polys: vec![c0, a],
            scale: pt.scale,
            level,
        })
    }

    /// Encrypts under the public key: `(v b + e0 + m, v a + e1)`.
    pub fn encrypt_public(
        &self,
        pt: &Plaintext,
        keys: &KeyBundle,
        rng: &mut impl Rng,
    ) -> Result<Ciphertext> {
        self.check_plaintext(pt)?;
        let n = self.ring_degree();
        let level = pt.level;
        let moduli = self.chain_moduli(level);
        let indices = 0..=level;
        let v = self.poly_from_signed(&sample_ternary(rng, n), indices.clone());
        let mut c0 = self.poly_from_signed(&sample_error(rng, n), indices.clone());
        let mut c1 = self.poly_from_signed(&sample_error(rng, n), indices);
        let mut b = keys.public_key.b.clone();
        let mut a = keys.public_key.a.clone();
        b.truncate(level + 1);
        a.truncate(level + 1);
        c0.fma_assign(&v, &b, moduli);
        c0.add_assign(&pt.poly, moduli);
        c1.fma_assign(&v, &a, moduli);
        Ok(Ciphertext {
            polys: vec![c0, c1],
            scale: pt.scale,
            level,
        })
    }

    pub fn decrypt(&self, ct: &Ciphertext, keys: &KeyBundle) -> Result<Plaintext> {
        if ct.degree() != 1 {
            return Err(Error::RelinearizeFirst(ct.degree()));
        }
        let moduli = self.chain_moduli(ct.level);
        let mut m = ct.polys[0].clone();
        m.fma_assign(&ct.polys[1], &keys.secret_key.ntt, moduli);
        Ok(Plaintext {
            poly: m,
            scale: ct.scale,
            level: ct.level,
        })
    }

    /// Decrypts and decodes in one step.
    pub fn decrypt_values(&self, ct: &Ciphertext, keys: &KeyBundle) -> Result<Vec<f64>> {
        self.decode(&self.decrypt(ct, keys)?)
    }

    pub fn add(&self, a: &Ciphertext, b: &Ciphertext) -> Result<Ciphertext> {
        if a.degree() != 1 || b.degree() != 1 {
            return Err(Error::RelinearizeFirst(a.degree().max(b.degree())));
        }
        check_same_level(a.level, b.level)?;
        if (a.scale - b.scale).abs() / a.scale >= SCALE_MATCH_TOLERANCE {
            return Err(Error::ScaleMismatch {
                left: a.scale,
                right: b.scale,
            });
        }
        let moduli = self.chain_moduli(a.level);
        let mut out = a.clone();
        for (x, y) in out.polys.iter_mut().zip(&b.polys) {
            x.add_assign(y, moduli);
        }
        Ok(out)
    }

    /// Tensor product of two degree-1 ciphertexts; the result has degree 2
    /// and scale `a.scale * b.scale`.
    pub fn mul(&self, a: &Ciphertext, b: &Ciphertext) -> Result<Ciphertext> {
        if a.degree() != 1 || b.degree() != 1 {
            return Err(Error::RelinearizeFirst(a.degree().max(b.degree())));
        }
        check_same_level(a.level, b.level)?;
        let moduli = self.chain_moduli(a.level);
        let d0 = a.polys[0].mul(&b.polys[0], moduli);
        let mut d1 = a.polys[0].mul(&b.polys[1], moduli);
        d1.fma_assign(&a.polys[1], &b.polys[0], moduli);
        let d2 = a.polys[1].mul(&b.polys[1], moduli);
        Ok(Ciphertext {
            polys: vec![d0, d1, d2],
            scale: a.scale * b.scale,
            level: a.level,
        })
    }

    /// Multiplies by a plaintext. Degree is unchanged; scales multiply.
    pub fn mul_plain(&self, ct: &Ciphertext, pt: &Plaintext) -> Result<Ciphertext> {
        self.check_plaintext(pt)?;
        check_same_level(ct.level, pt.level)?;
        let moduli = self.chain_moduli(ct.level);
        let polys = ct.polys.iter().map(|p| p.mul(&pt.poly, moduli)).collect();
        Ok(Ciphertext {
            polys,
            scale: ct.scale * pt.scale,
            level: ct.level,
        })
    }

    /// Switches a degree-2 ciphertext back to degree 1 under the secret key.
    ///
    /// A degree-1 input is returned unchanged and recorded in
    /// [`EvalStats::relin_noops`](super::EvalStats::relin_noops).
    pub fn relinearize(&self, ct: &Ciphertext, keys: &KeyBundle) -> Result<Ciphertext> {
        match ct.degree() {
            1 => {
                self.stats.record_relin_noop();
                Ok(ct.clone())
            }
            2 => {
                let key = keys.relin_key.as_ref().ok_or(Error::MissingRelinKey)?;
                let (k0, k1) = self.key_switch(&ct.polys[2], key, ct.level);
                let moduli = self.chain_moduli(ct.level);
                let mut c0 = ct.polys[0].clone();
                let mut c1 = ct.polys[1].clone();
                c0.add_assign(&k0, moduli);
                c1.add_assign(&k1, moduli);
                Ok(Ciphertext {
                    polys: vec![c0, c1],
                    scale: ct.scale,
                    level: ct.level,
                })
            }
            d => Err(Error::InvalidParams(format!(
                "unsupported ciphertext degree {d}"
            ))),
        }
    }

    /// Divides by the top prime of the current level and drops it.
    pub fn rescale(&self, ct: &Ciphertext) -> Result<Ciphertext> {
        if ct.level == 0 {
            return Err(Error::ChainExhausted);
        }
        let q = self.moduli[ct.level].value() as f64;
        let mut polys = ct.polys.clone();
        for p in &mut polys {
            self.drop_last_limb(p, ct.level);
        }
        Ok(Ciphertext {
            polys,
            scale: ct.scale / q,
            level: ct.level - 1,
        })
    }

    /// Cyclic slot rotation: output slot `s` holds input slot
    /// `(s + step) mod slots`. A step of zero returns a copy without any key
    /// lookup or key switch.
    pub fn rotate(&self, ct: &Ciphertext, step: i64, keys: &KeyBundle) -> Result<Ciphertext> {
        if ct.degree() != 1 {
            return Err(Error::RelinearizeFirst(ct.degree()));
        }
        let norm = self.normalize_step(step);
        if norm == 0 {
            return Ok(ct.clone());
        }
        let key = keys
            .galois_keys
            .get(&norm)
            .ok_or(Error::MissingGaloisKey(step))?;
        let perm = self.rotation_permutation(norm);
        let c0 = ct.polys[0].permute(perm);
        let c1 = ct.polys[1].permute(perm);
        let (mut k0, k1) = self.key_switch(&c1, key, ct.level);
        k0.add_assign(&c0, self.chain_moduli(ct.level));
        Ok(Ciphertext {
            polys: vec![k0, k1],
            scale: ct.scale,
            level: ct.level,
        })
    }

    /// Precomputes the key-switching decomposition of `ct` so that many
    /// rotations of the same ciphertext share it.
    pub fn hoist(&self, ct: &Ciphertext) -> Result<HoistedCiphertext> {
        if ct.degree() != 1 {
            return Err(Error::RelinearizeFirst(ct.degree()));
        }
        let digits = self.decompose(&ct.polys[1], ct.level);
        Ok(HoistedCiphertext {
            ct: ct.clone(),
            digits,
        })
    }

    /// Same result as [`CkksContext::rotate`] on the hoisted ciphertext, bit
    /// for bit, and counted as one key switch.
    pub fn rotate_hoisted(
        &self,
        h: &HoistedCiphertext,
        step: i64,
        keys: &KeyBundle,
    ) -> Result<Ciphertext> {
        let ct = &h.ct;
        let norm = self.normalize_step(step);
        if norm == 0 {
            return Ok(ct.clone());
        }
        let key = keys
            .galois_keys
            .get(&norm)
            .ok_or(Error::MissingGaloisKey(step))?;
        let perm = self.rotation_permutation(norm);
        let c0 = ct.polys[0].permute(perm);
        let (mut k0, k1) = self.key_switch_digits(&h.digits, Some(perm), key, ct.level);
        k0.add_assign(&c0, self.chain_moduli(ct.level));
        Ok(Ciphertext {
            polys: vec![k0, k1],
            scale: ct.scale,
            level: ct.level,
        })
    }

    fn check_plaintext(&self, pt: &Plaintext) -> Result<()> {
        if !(pt.scale > 0.0 && pt.scale.is_finite()) {
            return Err(Error::InvalidScale(pt.scale));
        }
        self.check_level(pt.level)?;
        if pt.poly.num_limbs() != pt.level + 1 {
            return Err(Error::InvalidParams(
                "plaintext shape does not match its level".into(),
            ));
        }
        Ok(())
    }

    /// An all-zero ciphertext; it decrypts to zero exactly.
    pub fn zero_ciphertext(&self, scale: f64, level: usize) -> Result<Ciphertext> {
        self.check_level(level)?;
        let zero = RnsPoly::zero(self.ring_degree(), level + 1);
        Ok(Ciphertext {
            polys: vec![zero.clone(), zero],
            scale,
            level,
        })
    }
}

/// A ciphertext together with its key-switching decomposition.
#[derive(Clone, Debug)]
pub struct HoistedCiphertext {
    ct: Ciphertext,
    digits: Vec<RnsPoly>,
}

impl HoistedCiphertext {
    pub fn ciphertext(&self) -> &Ciphertext {
        &self.ct
    }
}

fn check_same_level(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::LevelMismatch { left, right });
    }
    Ok(())
}
