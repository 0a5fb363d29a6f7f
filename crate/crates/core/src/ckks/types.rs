use super::poly::RnsPoly;

/// An encoded message: an NTT-form polynomial over `q_0..q_level` plus the
/// fixed-point scale its slots were multiplied by.
#[derive(Clone, Debug, PartialEq)]
pub struct Plaintext {
    pub(crate) poly: RnsPoly,
    pub(crate) scale: f64,
    pub(crate) level: usize,
}

impl Plaintext {
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn poly(&self) -> &RnsPoly {
        &self.poly
    }
}

/// A CKKS ciphertext.
///
/// Holds two polynomials normally, three between a ciphertext product and
/// the relinearization that follows it. `scale` is tracked exactly as the
/// product/quotient of the factors that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct Ciphertext {
    pub(crate) polys: Vec<RnsPoly>,
    pub(crate) scale: f64,
    pub(crate) level: usize,
}

impl Ciphertext {
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn level(&self) -> usize {
        self.level
    }

    /// 1 for a standard ciphertext, 2 right after a ciphertext product.
    pub fn degree(&self) -> usize {
        self.polys.len() - 1
    }

    pub fn polys(&self) -> &[RnsPoly] {
        &self.polys
    }
}
