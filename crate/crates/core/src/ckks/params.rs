use std::fmt::Write as _;

use super::arith::{is_prime, ntt_primes, Modulus};
use crate::{Error, Result};

/// Parameters of the leveled CKKS instance.
///
/// `modulus_chain[0]` is the base prime that remains after every rescale;
/// `modulus_chain[1..=levels]` are the scaling primes, consumed from the top.
/// `aux_modulus` is the special prime used only during key switching.
///
/// These are desk-scale parameters for experimentation. They are not chosen
/// for any security level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CkksParams {
    pub ring_degree: usize,
    pub modulus_chain: Vec<u64>,
    pub aux_modulus: u64,
    pub scale_bits: u32,
    pub seed: u64,
}

impl Default for CkksParams {
    fn default() -> Self {
        Self::new(
            Self::DEFAULT_RING_DEGREE,
            Self::DEFAULT_SCALE_BITS,
            Self::DEFAULT_LEVELS,
            Self::DEFAULT_SEED,
        )
        .expect("default parameters are valid")
    }
}

impl CkksParams {
    pub const DEFAULT_RING_DEGREE: usize = 1 << 10;
    pub const DEFAULT_SCALE_BITS: u32 = 40;
    pub const DEFAULT_LEVELS: usize = 2;
    pub const DEFAULT_SEED: u64 = 0x5eed;
    pub const DEFAULT_BASE_BITS: u32 = 55;
    pub const DEFAULT_AUX_BITS: u32 = 61;

    pub fn new(ring_degree: usize, scale_bits: u32, levels: usize, seed: u64) -> Result<Self> {
        Self::with_bit_sizes(
            ring_degree,
            scale_bits,
            levels,
            Self::DEFAULT_BASE_BITS,
            Self::DEFAULT_AUX_BITS,
            seed,
        )
    }

    /// Searches NTT-friendly primes for the requested sizes.
    pub fn with_bit_sizes(
        ring_degree: usize,
        scale_bits: u32,
        levels: usize,
        base_bits: u32,
        aux_bits: u32,
        seed: u64,
    ) -> Result<Self> {
        if !ring_degree.is_power_of_two() || ring_degree < 8 {
            return Err(Error::InvalidParams(format!(
                "ring degree {ring_degree} must be a power of two >= 8"
            )));
        }
        if levels < 2 {
            return Err(Error::InsufficientDepth { levels });
        }
        for bits in [scale_bits, base_bits, aux_bits] {
            if !(20..=Modulus::MAX_BITS).contains(&bits) {
                return Err(Error::InvalidParams(format!(
                    "prime size of {bits} bits outside [20, {}]",
                    Modulus::MAX_BITS
                )));
            }
        }
        if base_bits < scale_bits {
            return Err(Error::InvalidParams(
                "base prime must be at least as wide as the scale".into(),
            ));
        }
        let mut taken = Vec::new();
        let aux = ntt_primes(aux_bits, ring_degree, 1, &taken);
        taken.extend(&aux);
        let base = ntt_primes(base_bits, ring_degree, 1, &taken);
        taken.extend(&base);
        let scaling = ntt_primes(scale_bits, ring_degree, levels, &taken);
        if aux.len() != 1 || base.len() != 1 || scaling.len() != levels {
            return Err(Error::InvalidParams(
                "not enough NTT-friendly primes".into(),
            ));
        }
        let mut modulus_chain = base;
        modulus_chain.extend(scaling);
        let params = Self {
            ring_degree,
            modulus_chain,
            aux_modulus: aux[0],
            scale_bits,
            seed,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.ring_degree;
        if !n.is_power_of_two() || n < 8 {
            return Err(Error::InvalidParams(format!(
                "ring degree {n} must be a power of two >= 8"
            )));
        }
        if self.modulus_chain.len() < 3 {
            return Err(Error::InsufficientDepth {
                levels: self.modulus_chain.len().saturating_sub(1),
            });
        }
        if !(1..=Modulus::MAX_BITS).contains(&self.scale_bits) {
            return Err(Error::InvalidParams(format!(
                "scale_bits {} out of range",
                self.scale_bits
            )));
        }
        let two_n = 2 * n as u64;
        let mut seen = Vec::new();
        for &q in self
            .modulus_chain
            .iter()
            .chain(std::iter::once(&self.aux_modulus))
        {
            if q < 3 || 64 - q.leading_zeros() > Modulus::MAX_BITS {
                return Err(Error::InvalidParams(format!(
                    "prime {q} out of the supported range"
                )));
            }
            if !is_prime(q) || q % two_n != 1 {
                return Err(Error::NotNttFriendly(q));
            }
            if seen.contains(&q) {
                return Err(Error::InvalidParams(format!("prime {q} appears twice")));
            }
            seen.push(q);
        }
        for &q in &self.modulus_chain[1..] {
            let log = (q as f64).log2();
            if (log - self.scale_bits as f64).abs() > 1.0 {
                return Err(Error::InvalidParams(format!(
                    "scaling prime {q} (log2 {log:.2}) too far from scale 2^{}",
                    self.scale_bits
                )));
            }
        }
        Ok(())
    }

    pub fn levels(&self) -> usize {
        self.modulus_chain.len() - 1
    }

    pub fn top_level(&self) -> usize {
        self.levels()
    }

    pub fn slots(&self) -> usize {
        self.ring_degree / 2
    }

    pub fn default_scale(&self) -> f64 {
        2f64.powi(self.scale_bits as i32)
    }

    /// Largest matrix dimension `N` with `2 N^2 <= slots`.
    pub fn max_matrix_dim(&self) -> usize {
        let slots = self.slots();
        let mut dim = 0;
        while 2 * (dim + 1) * (dim + 1) <= slots {
            dim += 1;
        }
        dim
    }

    /// Parses the `key = value` parameter file format.
    ///
    /// Recognised keys: `ring_degree`, `scale_bits`, `levels`, `seed`, and the
    /// optional `base_bits` / `aux_bits`. Blank lines and `#` comments are
    /// ignored.
    pub fn from_kv_str(text: &str) -> Result<Self> {
        let mut ring_degree = Self::DEFAULT_RING_DEGREE;
        let mut scale_bits = Self::DEFAULT_SCALE_BITS;
        let mut levels = Self::DEFAULT_LEVELS;
        let mut seed = Self::DEFAULT_SEED;
        let mut base_bits = Self::DEFAULT_BASE_BITS;
        let mut aux_bits = Self::DEFAULT_AUX_BITS;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .or_else(|| line.split_once(':'))
                .ok_or_else(|| {
                    Error::Parse(format!("line {}: expected key = value", lineno + 1))
                })?;
            let (key, value) = (key.trim(), value.trim());
            let bad =
                |_| Error::Parse(format!("line {}: bad value for {key}: {value}", lineno + 1));
            match key {
                "ring_degree" => ring_degree = value.parse().map_err(bad)?,
                "scale_bits" => scale_bits = value.parse().map_err(bad)?,
                "levels" => levels = value.parse().map_err(bad)?,
                "seed" => seed = value.parse().map_err(bad)?,
                "base_bits" => base_bits = value.parse().map_err(bad)?,
                "aux_bits" => aux_bits = value.parse().map_err(bad)?,
                other => {
                    return Err(Error::Parse(format!(
                        "line {}: unknown key {other}",
                        lineno + 1
                    )))
                }
            }
        }
        Self::with_bit_sizes(ring_degree, scale_bits, levels, base_bits, aux_bits, seed)
    }

    pub fn to_kv_string(&self) -> String {
        let bits = |q: u64| 64 - q.leading_zeros();
        let mut s = String::new();
        let _ = writeln!(s, "ring_degree = {}", self.ring_degree);
        let _ = writeln!(s, "scale_bits = {}", self.scale_bits);
        let _ = writeln!(s, "levels = {}", self.levels());
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "base_bits = {}", bits(self.modulus_chain[0]));
        let _ = writeln!(s, "aux_bits = {}", bits(self.aux_modulus));
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_chain_satisfies_invariants() {
        let p = CkksParams::default();
        p.validate().unwrap();
        assert_eq!(p.levels(), 2);
        assert_eq!(p.slots(), 512);
        assert_eq!(p.max_matrix_dim(), 16);
        for &q in &p.modulus_chain[1..] {
            assert_eq!(64 - q.leading_zeros(), p.scale_bits);
        }
    }

    #[test]
    fn single_level_is_rejected() {
        assert!(matches!(
            CkksParams::new(1024, 40, 1, 0),
            Err(Error::InsufficientDepth { levels: 1 })
        ));
    }

    #[test]
    fn non_ntt_friendly_prime_is_rejected() {
        let mut p = CkksParams::default();
        // 2^61 - 1 is prime but not 1 mod 2048
        p.modulus_chain[0] = (1 << 61) - 1;
        assert!(matches!(p.validate(), Err(Error::NotNttFriendly(_))));
    }

    #[test]
    fn kv_roundtrip() {
        let p = CkksParams::new(2048, 36, 3, 99).unwrap();
        let q = CkksParams::from_kv_str(&p.to_kv_string()).unwrap();
        assert_eq!(p, q);
        let r = CkksParams::from_kv_str(
            "# desk\nring_degree = 2048\nscale_bits=36\nlevels: 3\nseed = 99\n",
        )
        .unwrap();
        assert_eq!(p, r);
        assert!(CkksParams::from_kv_str("colour = blue").is_err());
    }
}
