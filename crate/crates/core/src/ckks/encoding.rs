//! Canonical-embedding slot encoding.
//!
//! Slot `j` is the evaluation of the message polynomial at `zeta^(5^j)` with
//! `zeta = exp(i*pi/n)`. Real inputs occupy the real part of each slot; the
//! conjugate roots receive the conjugate values so the polynomial has real
//! coefficients.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::context::CkksContext;
use super::poly::RnsPoly;
use super::types::Plaintext;
use crate::{Error, Result};

pub(crate) struct SlotEncoder {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// `t` such that `2t + 1 = 5^j mod 2n`
    slot_index: Vec<usize>,
    /// `t` such that `2t + 1 = -5^j mod 2n`
    conj_index: Vec<usize>,
    /// `zeta^k` for `k < n`
    twist: Vec<Complex64>,
}

impl fmt::Debug for SlotEncoder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SlotEncoder").field("n", &self.n).finish()
    }
}

impl SlotEncoder {
    pub(crate) fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let two_n = 2 * n;
        let slots = n / 2;
        let mut slot_index = Vec::with_capacity(slots);
        let mut conj_index = Vec::with_capacity(slots);
        let mut g = 1usize;
        for _ in 0..slots {
            slot_index.push((g - 1) / 2);
            conj_index.push((two_n - g - 1) / 2);
            g = g * 5 % two_n;
        }
        let twist = (0..n)
            .map(|k| Complex64::from_polar(1.0, std::f64::consts::PI * k as f64 / n as f64))
            .collect();
        Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            slot_index,
            conj_index,
            twist,
        }
    }

    /// Real polynomial coefficients whose slots are `values` (zero-padded).
    pub(crate) fn embed_inverse(&self, values: &[f64]) -> Vec<f64> {
        let mut y = vec![Complex64::new(0.0, 0.0); self.n];
        for (j, &v) in values.iter().enumerate() {
            y[self.slot_index[j]] = Complex64::new(v, 0.0);
            y[self.conj_index[j]] = Complex64::new(v, 0.0);
        }
        self.forward.process(&mut y);
        let inv_n = 1.0 / self.n as f64;
        y.iter()
            .zip(&self.twist)
            .map(|(u, w)| (u * w.conj()).re * inv_n)
            .collect()
    }

    /// Slot values (real parts) of the polynomial with the given coefficients.
    pub(crate) fn embed(&self, coeffs: &[f64]) -> Vec<f64> {
        let mut u: Vec<Complex64> = coeffs
            .iter()
            .zip(&self.twist)
            .map(|(&c, w)| w * c)
            .collect();
        self.inverse.process(&mut u);
        self.slot_index.iter().map(|&t| u[t].re).collect()
    }
}

/// Residue of an integer-valued float modulo `q`, exact for any magnitude.
fn residue_of_integral(x: f64, q: &super::arith::Modulus) -> u64 {
    if x.abs() < 9.0e18 {
        return q.reduce_i64(x as i64);
    }
    // x = mantissa * 2^exp with |mantissa| < 2^53
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64 - 1075;
    let mantissa = ((bits & ((1 << 52) - 1)) | (1 << 52)) as i64;
    let signed = if x < 0.0 { -mantissa } else { mantissa };
    q.mul(q.reduce_i64(signed), q.pow(2, exp as u64))
}

impl CkksContext {
    /// Encodes up to `slots` real values at the given scale and level.
    pub fn encode(&self, values: &[f64], scale: f64, level: usize) -> Result<Plaintext> {
        if values.len() > self.slots() {
            return Err(Error::TooManyValues {
                got: values.len(),
                capacity: self.slots(),
            });
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidScale(scale));
        }
        self.check_level(level)?;
        let coeffs = self.encoder.embed_inverse(values);
        let scaled: Vec<f64> = coeffs.iter().map(|c| (c * scale).round()).collect();
        if let Some(bad) = scaled.iter().find(|c| !c.is_finite()) {
            return Err(Error::CoefficientOverflow(*bad));
        }
        let limbs = (0..=level)
            .map(|i| {
                let q = &self.moduli[i];
                let mut limb: Vec<u64> =
                    scaled.iter().map(|&c| residue_of_integral(c, q)).collect();
                self.tables[i].forward(&mut limb);
                limb
            })
            .collect();
        Ok(Plaintext {
            poly: RnsPoly::from_limbs(limbs),
            scale,
            level,
        })
    }

    /// Decodes all `slots` values of a plaintext.
    pub fn decode(&self, pt: &Plaintext) -> Result<Vec<f64>> {
        self.check_level(pt.level)?;
        if pt.poly.num_limbs() != pt.level + 1 || pt.poly.degree() != self.ring_degree() {
            return Err(Error::InvalidParams(
                "plaintext shape does not match its level".into(),
            ));
        }
        let coeffs: Vec<f64> = self
            .reconstruct_coeffs(&pt.poly, pt.level)
            .into_iter()
            .map(|c| c / pt.scale)
            .collect();
        Ok(self.encoder.embed(&coeffs))
    }
}
