//! Word-sized modular arithmetic and NTT-friendly prime search.

/// An odd modulus below 2^62 with precomputed Barrett constants.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Modulus {
    value: u64,
    bits: u32,
    // floor(2^(2*bits) / value)
    barrett: u64,
    // floor(2^128 / value) as (low, high) words
    ratio: (u64, u64),
}

impl Modulus {
    pub const MAX_BITS: u32 = 62;

    pub fn new(value: u64) -> Self {
        assert!(value > 2, "modulus must exceed 2");
        let bits = 64 - value.leading_zeros();
        assert!(
            bits <= Self::MAX_BITS,
            "modulus wider than {} bits",
            Self::MAX_BITS
        );
        let barrett = ((1u128 << (2 * bits)) / value as u128) as u64;
        let ratio = u128::MAX / value as u128;
        Self {
            value,
            bits,
            barrett,
            ratio: (ratio as u64, (ratio >> 64) as u64),
        }
    }

    #[inline(always)]
    pub fn value(&self) -> u64 {
        self.value
    }

    #[inline(always)]
    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Reduces a product `x < value^2`.
    #[inline(always)]
    pub fn reduce_u128(&self, x: u128) -> u64 {
        let q = self.value;
        let b = self.bits;
        // (x >> (b - 1)) and (prod >> (b + 1)) on 64-bit halves; u128 shifts
        // by a runtime amount compile to branches
        let (lo, hi) = (x as u64, (x >> 64) as u64);
        let t = (hi << (65 - b)) | (lo >> (b - 1));
        let prod = t as u128 * self.barrett as u128;
        let (plo, phi) = (prod as u64, (prod >> 64) as u64);
        let est = (phi << (63 - b)) | (plo >> (b + 1));
        let mut r = (x as u64).wrapping_sub(est.wrapping_mul(q));
        if r >= q {
            r -= q;
        }
        if r >= q {
            r -= q;
        }
        r
    }

    /// Reduces any 128-bit value, e.g. a sum of several products.
    #[inline(always)]
    pub fn reduce_wide(&self, x: u128) -> u64 {
        let q = self.value;
        let (x0, x1) = (x as u64, (x >> 64) as u64);
        let (r0, r1) = self.ratio;
        // high word of x * ratio / 2^128, skipping the lowest partial product
        let carry = ((x0 as u128 * r0 as u128) >> 64) as u64;
        let t = x0 as u128 * r1 as u128 + carry as u128;
        let u = x1 as u128 * r0 as u128 + (t as u64) as u128;
        let est = x1
            .wrapping_mul(r1)
            .wrapping_add((t >> 64) as u64)
            .wrapping_add((u >> 64) as u64);
        let mut r = x0.wrapping_sub(est.wrapping_mul(q));
        while r >= q {
            r -= q;
        }
        r
    }

    #[inline(always)]
    pub fn reduce(&self, x: u64) -> u64 {
        if x < self.value {
            x
        } else {
            x % self.value
        }
    }

    /// Reduces a signed integer into `[0, q)`.
    #[inline(always)]
    pub fn reduce_i64(&self, x: i64) -> u64 {
        let r = self.reduce(x.unsigned_abs());
        if x < 0 && r != 0 {
            self.value - r
        } else {
            r
        }
    }

    #[inline(always)]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.reduce_u128(a as u128 * b as u128)
    }

    #[inline(always)]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.value {
            s - self.value
        } else {
            s
        }
    }

    #[inline(always)]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.value - b
        }
    }

    #[inline(always)]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.value - a
        }
    }

    /// Precomputes `floor(w * 2^64 / q)` for repeated multiplication by `w`.
    #[inline(always)]
    pub fn shoup(&self, w: u64) -> u64 {
        (((w as u128) << 64) / self.value as u128) as u64
    }

    /// `a * w mod q` given `w_shoup = self.shoup(w)`.
    #[inline(always)]
    pub fn mul_shoup(&self, a: u64, w: u64, w_shoup: u64) -> u64 {
        let hi = ((a as u128 * w_shoup as u128) >> 64) as u64;
        let r = a.wrapping_mul(w).wrapping_sub(hi.wrapping_mul(self.value));
        if r >= self.value {
            r - self.value
        } else {
            r
        }
    }

    /// Like [`Modulus::mul_shoup`] but leaves the result in `[0, 2q)`.
    #[inline(always)]
    pub fn mul_shoup_lazy(&self, a: u64, w: u64, w_shoup: u64) -> u64 {
        let hi = ((a as u128 * w_shoup as u128) >> 64) as u64;
        a.wrapping_mul(w).wrapping_sub(hi.wrapping_mul(self.value))
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1u64;
        base = self.reduce(base);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Inverse of `a`; the modulus must be prime.
    pub fn inv(&self, a: u64) -> Option<u64> {
        let a = self.reduce(a);
        if a == 0 {
            None
        } else {
            Some(self.pow(a, self.value - 2))
        }
    }

    /// Centered representative of `a` in `(-q/2, q/2]`.
    #[inline(always)]
    pub fn center(&self, a: u64) -> i64 {
        if a > self.value / 2 {
            -((self.value - a) as i64)
        } else {
            a as i64
        }
    }
}

fn mul_mod_slow(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod_slow(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_slow(acc, base, m);
        }
        base = mul_mod_slow(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for all 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod_slow(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_slow(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Returns `count` distinct primes `p ≡ 1 (mod 2n)` scanning downward from
/// `2^bits`, skipping anything listed in `exclude`.
pub fn ntt_primes(bits: u32, ring_degree: usize, count: usize, exclude: &[u64]) -> Vec<u64> {
    assert!((3..=Modulus::MAX_BITS).contains(&bits));
    let step = 2 * ring_degree as u64;
    let mut candidate = ((1u64 << bits) / step) * step + 1;
    if candidate > 1u64 << bits {
        candidate -= step;
    }
    let mut out = Vec::with_capacity(count);
    while out.len() < count && candidate > step {
        if is_prime(candidate) && !exclude.contains(&candidate) {
            out.push(candidate);
        }
        candidate -= step;
    }
    out
}

/// The smallest primitive `2n`-th root of unity modulo prime `q`.
pub fn min_primitive_root(q: &Modulus, two_n: u64) -> Option<u64> {
    let qv = q.value();
    if !(qv - 1).is_multiple_of(two_n) {
        return None;
    }
    let cofactor = (qv - 1) / two_n;
    let mut best: Option<u64> = None;
    for x in 2..qv.min(1 << 20) {
        let g = q.pow(x, cofactor);
        // primitive iff g^(2n/2) = -1
        if q.pow(g, two_n / 2) == qv - 1 {
            // every primitive root is g^k for odd k; take the minimum
            let g2 = q.mul(g, g);
            let mut r = g;
            let mut min = g;
            for _ in 0..two_n / 2 {
                r = q.mul(r, g2);
                min = min.min(r);
            }
            best = Some(min);
            break;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn primality_small_cases() {
        let primes: Vec<u64> = (0..60).filter(|&n| is_prime(n)).collect();
        assert_eq!(
            primes,
            vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]
        );
        assert!(is_prime(0xffff_ffff_ffff_ffc5));
        assert!(!is_prime(3_215_031_751));
    }

    #[test]
    fn found_primes_are_ntt_friendly_and_distinct() {
        let ps = ntt_primes(40, 1024, 4, &[]);
        assert_eq!(ps.len(), 4);
        for (i, p) in ps.iter().enumerate() {
            assert!(is_prime(*p));
            assert_eq!(p % 2048, 1);
            assert_eq!(64 - p.leading_zeros(), 40);
            assert!(!ps[..i].contains(p));
        }
        let more = ntt_primes(40, 1024, 2, &ps);
        assert!(more.iter().all(|p| !ps.contains(p)));
    }

    #[test]
    fn primitive_root_has_order_two_n() {
        let q = Modulus::new(ntt_primes(50, 256, 1, &[])[0]);
        let r = min_primitive_root(&q, 512).unwrap();
        assert_eq!(q.pow(r, 512), 1);
        assert_eq!(q.pow(r, 256), q.value() - 1);
    }

    proptest! {
        #[test]
        fn barrett_matches_u128_remainder(a in any::<u64>(), b in any::<u64>(), idx in 0usize..3) {
            let q = [Modulus::new(0x3fff_ffff_fffc_0001), Modulus::new((1 << 61) - 1), Modulus::new(1_099_511_480_321)][idx];
            let (a, b) = (a % q.value(), b % q.value());
            prop_assert_eq!(q.mul(a, b), mul_mod_slow(a, b, q.value()));
            let ws = q.shoup(b);
            prop_assert_eq!(q.mul_shoup(a, b, ws), mul_mod_slow(a, b, q.value()));
        }

        #[test]
        fn wide_reduction_matches_remainder(x in any::<u128>(), idx in 0usize..4) {
            let q = [Modulus::new(0x3fff_ffff_fffc_0001), Modulus::new((1 << 61) - 1), Modulus::new(1_099_511_480_321), Modulus::new(3)][idx];
            prop_assert_eq!(q.reduce_wide(x) as u128, x % q.value() as u128);
            prop_assert_eq!(q.reduce_wide(u128::MAX) as u128, u128::MAX % q.value() as u128);
        }
    }
}
