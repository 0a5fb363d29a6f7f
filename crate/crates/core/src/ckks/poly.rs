use super::arith::Modulus;

/// A ring element stored as one residue vector per prime.
///
/// Ciphertexts, plaintexts and keys keep their polynomials in NTT
/// (evaluation) form; limb `i` belongs to the `i`-th modulus of whatever
/// basis the owner uses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RnsPoly {
    pub(crate) limbs: Vec<Vec<u64>>,
}

impl RnsPoly {
    pub fn zero(n: usize, limbs: usize) -> Self {
        Self {
            limbs: vec![vec![0; n]; limbs],
        }
    }

    pub fn from_limbs(limbs: Vec<Vec<u64>>) -> Self {
        Self { limbs }
    }

    pub fn limbs(&self) -> &[Vec<u64>] {
        &self.limbs
    }

    pub fn num_limbs(&self) -> usize {
        self.limbs.len()
    }

    pub fn degree(&self) -> usize {
        self.limbs.first().map_or(0, Vec::len)
    }

    pub fn truncate(&mut self, limbs: usize) {
        self.limbs.truncate(limbs);
    }

    pub fn add_assign(&mut self, other: &Self, moduli: &[Modulus]) {
        for ((a, b), q) in self.limbs.iter_mut().zip(&other.limbs).zip(moduli) {
            for (x, y) in a.iter_mut().zip(b) {
                *x = q.add(*x, *y);
            }
        }
    }

    pub fn sub_assign(&mut self, other: &Self, moduli: &[Modulus]) {
        for ((a, b), q) in self.limbs.iter_mut().zip(&other.limbs).zip(moduli) {
            for (x, y) in a.iter_mut().zip(b) {
                *x = q.sub(*x, *y);
            }
        }
    }

    pub fn neg_assign(&mut self, moduli: &[Modulus]) {
        for (a, q) in self.limbs.iter_mut().zip(moduli) {
            for x in a.iter_mut() {
                *x = q.neg(*x);
            }
        }
    }

    pub fn mul_assign(&mut self, other: &Self, moduli: &[Modulus]) {
        for ((a, b), q) in self.limbs.iter_mut().zip(&other.limbs).zip(moduli) {
            for (x, y) in a.iter_mut().zip(b) {
                *x = q.mul(*x, *y);
            }
        }
    }

    /// Pointwise product over the first `moduli.len()` limbs.
    pub fn mul(&self, other: &Self, moduli: &[Modulus]) -> Self {
        let limbs = self
            .limbs
            .iter()
            .zip(&other.limbs)
            .zip(moduli)
            .map(|((a, b), q)| a.iter().zip(b).map(|(x, y)| q.mul(*x, *y)).collect())
            .collect();
        Self { limbs }
    }

    /// `self += a * b` pointwise.
    pub fn fma_assign(&mut self, a: &Self, b: &Self, moduli: &[Modulus]) {
        for (((acc, x), y), q) in self
            .limbs
            .iter_mut()
            .zip(&a.limbs)
            .zip(&b.limbs)
            .zip(moduli)
        {
            for ((z, u), v) in acc.iter_mut().zip(x).zip(y) {
                *z = q.add(*z, q.mul(*u, *v));
            }
        }
    }

    /// Applies an index permutation to every limb: `out[k] = in[perm[k]]`.
    pub fn permute(&self, perm: &[usize]) -> Self {
        let limbs = self
            .limbs
            .iter()
            .map(|limb| perm.iter().map(|&src| limb[src]).collect())
            .collect();
        Self { limbs }
    }
}
