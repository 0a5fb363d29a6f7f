//! Plaintext ground truth: the exact product, the Frobenius error and
//! brute-force predictions of the engine's operation counts.

use crate::engine::{MatmulMethod, SkipRule};
use crate::sparse::DenseMatrix;
use crate::{Error, Result};

fn same_dim(a: &DenseMatrix, b: &DenseMatrix) -> Result<usize> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(a.dim())
}

pub fn plain_matmul(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    let n = same_dim(a, b)?;
    let mut out = DenseMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for l in 0..n {
                s += a.get(i, l) * b.get(l, j);
            }
            out.set(i, j, s);
        }
    }
    Ok(out)
}

/// `sqrt(sum (a_ij - b_ij)^2)`.
pub fn frobenius_error(a: &DenseMatrix, b: &DenseMatrix) -> Result<f64> {
    same_dim(a, b)?;
    Ok(a.values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt())
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PredictedCounts {
    /// Scalar products evaluated, i.e. ciphertext-ciphertext multiplications.
    pub matching_pairs: u64,
    pub k_a: u64,
    pub k_b: u64,
    pub k: u64,
    pub alignment_rotations: u64,
    pub accumulation_rotations: u64,
}

/// Slot of each dense entry under the method's packing, found by sorting
/// coordinates on the layout's traversal key.
fn slot_map(
    m: &DenseMatrix,
    key: impl Fn(usize, usize) -> (usize, usize, usize),
    keep_zeros: bool,
) -> Vec<Option<usize>> {
    let n = m.dim();
    let mut coords: Vec<(usize, usize)> = (0..n)
        .flat_map(|r| (0..n).map(move |c| (r, c)))
        .filter(|&(r, c)| keep_zeros || m.is_nonzero(r, c))
        .collect();
    coords.sort_by_key(|&(r, c)| key(r, c));
    let mut slots = vec![None; n * n];
    for (p, (r, c)) in coords.into_iter().enumerate() {
        slots[r * n + c] = Some(p);
    }
    slots
}

/// Counts the engine should record for `method` on `a * b`, from the dense
/// matrices alone. `slice_height` matters only for the sliced method.
pub fn predicted_op_counts(
    a: &DenseMatrix,
    b: &DenseMatrix,
    method: MatmulMethod,
    skip: SkipRule,
    slice_height: usize,
) -> Result<PredictedCounts> {
    let n = same_dim(a, b)?;
    let g = slice_height.max(1);
    let dense = matches!(method, MatmulMethod::NaiveDense | MatmulMethod::NaiveSparse);
    let (sa, sb) = match method {
        MatmulMethod::NaiveDense | MatmulMethod::NaiveSparse => (
            slot_map(a, |r, c| (0, r, c), true),
            slot_map(b, |r, c| (0, c, r), true),
        ),
        MatmulMethod::CsrC => (
            slot_map(a, |r, c| (0, r, c), false),
            slot_map(b, |r, c| (0, c, r), false),
        ),
        MatmulMethod::VcsrC => (
            slot_map(a, |r, c| (r / g, c, r), false),
            slot_map(b, |r, c| (c / g, r, c), false),
        ),
    };
    let mut out = PredictedCounts {
        k_a: a.nnz() as u64,
        k_b: b.nnz() as u64,
        ..Default::default()
    };
    out.k = out.k_a + out.k_b;
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                let (za, zb) = (a.is_nonzero(i, l), b.is_nonzero(l, j));
                let evaluated = match method {
                    MatmulMethod::NaiveDense => true,
                    MatmulMethod::NaiveSparse => match skip {
                        SkipRule::Either => za && zb,
                        SkipRule::Both => za || zb,
                    },
                    MatmulMethod::CsrC | MatmulMethod::VcsrC => za && zb,
                };
                if !evaluated {
                    continue;
                }
                let (ap, bp) = (sa[i * n + l], sb[l * n + j]);
                let (ap, bp) = match (ap, bp) {
                    (Some(x), Some(y)) => (x, y),
                    _ => unreachable!("evaluated entries are packed (dense = {dense})"),
                };
                out.matching_pairs += 1;
                out.alignment_rotations += u64::from(ap != bp);
                out.accumulation_rotations += u64::from(ap.min(bp) != i * n + j);
            }
        }
    }
    Ok(out)
}

/// One observation for [`complexity_fit`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexityPoint {
    pub n: usize,
    /// `k_A + k_B`
    pub k: u64,
    pub matching_pairs: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexityReport {
    /// Least-squares slope of `matching_pairs` against `N k`.
    pub fitted_c: f64,
    /// Smallest `c` with `matching_pairs <= c N k` at every point.
    pub tightest_c: f64,
    /// `matching_pairs - fitted_c N k` per point.
    pub residuals: Vec<f64>,
    /// Points exceeding `BOUND_C * N * k`.
    pub violations: Vec<usize>,
}

impl ComplexityReport {
    /// A row-column intersection has at most `min(k_A, k_B) <= k / 2`
    /// entries summed over outputs, per row or column: `pairs <= N k / 2`.
    pub const BOUND_C: f64 = 0.5;

    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `matching_pairs = O(N k)`: fits the constant and flags points
/// above the analytic bound `N k / 2`. Needs at least three distinct
/// `(N, k)` points.
pub fn complexity_fit(points: &[ComplexityPoint]) -> Result<ComplexityReport> {
    let mut distinct: Vec<(usize, u64)> = points.iter().map(|p| (p.n, p.k)).collect();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} distinct (N, k) points, need 3",
            distinct.len()
        )));
    }
    let x: Vec<f64> = points.iter().map(|p| p.n as f64 * p.k as f64).collect();
    let y: Vec<f64> = points.iter().map(|p| p.matching_pairs as f64).collect();
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let fitted_c = if sxx > 0.0 {
        x.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>() / sxx
    } else {
        0.0
    };
    let tightest_c = x
        .iter()
        .zip(&y)
        .filter(|(a, _)| **a > 0.0)
        .map(|(a, b)| b / a)
        .fold(0.0, f64::max);
    let residuals = x.iter().zip(&y).map(|(a, b)| b - fitted_c * a).collect();
    let violations = (0..points.len())
        .filter(|&i| y[i] > ComplexityReport::BOUND_C * x[i])
        .collect();
    Ok(ComplexityReport {
        fitted_c,
        tightest_c,
        residuals,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_products() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let b = DenseMatrix::from_rows(&[vec![5.0, 6.0], vec![7.0, 8.0]]).unwrap();
        let expected = DenseMatrix::from_rows(&[vec![19.0, 22.0], vec![43.0, 50.0]]).unwrap();
        assert_eq!(plain_matmul(&a, &b).unwrap(), expected);
        assert_eq!(plain_matmul(&DenseMatrix::identity(2), &a).unwrap(), a);
        assert_eq!(
            plain_matmul(&DenseMatrix::zeros(2), &a).unwrap(),
            DenseMatrix::zeros(2)
        );
        assert!(plain_matmul(&a, &DenseMatrix::zeros(3)).is_err());
    }

    #[test]
    fn frobenius_cases() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(frobenius_error(&a, &a).unwrap(), 0.0);
        let mut b = a.clone();
        b.set(1, 0, 6.0);
        assert_eq!(frobenius_error(&a, &b).unwrap(), 3.0);
        assert_eq!(frobenius_error(&b, &a).unwrap(), 3.0);
        assert!(frobenius_error(&a, &DenseMatrix::zeros(1)).is_err());
    }

    #[test]
    fn prediction_boundaries() {
        let full = DenseMatrix::new(4, vec![1.0; 16]).unwrap();
        for m in MatmulMethod::ALL {
            let p = predicted_op_counts(&full, &full, m, SkipRule::Either, 2).unwrap();
            assert_eq!(p.matching_pairs, 64, "{m}");
            assert_eq!(p.k, 32);
        }
        let zero = DenseMatrix::zeros(4);
        let p = predicted_op_counts(&zero, &zero, MatmulMethod::CsrC, SkipRule::Either, 4).unwrap();
        assert_eq!(p, PredictedCounts::default());
        assert_eq!(
            predicted_op_counts(&zero, &zero, MatmulMethod::NaiveDense, SkipRule::Either, 4)
                .unwrap()
                .matching_pairs,
            64
        );

        let mut one = DenseMatrix::zeros(4);
        one.set(0, 0, 1.0);
        let p = predicted_op_counts(&one, &one, MatmulMethod::CsrC, SkipRule::Either, 4).unwrap();
        assert_eq!(
            (
                p.matching_pairs,
                p.alignment_rotations,
                p.accumulation_rotations
            ),
            (1, 0, 0)
        );
    }

    #[test]
    fn fit_needs_three_points() {
        let p = |n, k, m| ComplexityPoint {
            n,
            k,
            matching_pairs: m,
        };
        assert!(matches!(
            complexity_fit(&[p(4, 32, 64), p(4, 32, 64)]),
            Err(Error::InsufficientData(_))
        ));
        let dense: Vec<_> = [4u64, 8, 16]
            .iter()
            .map(|&n| p(n as usize, 2 * n * n, n * n * n))
            .collect();
        let r = complexity_fit(&dense).unwrap();
        assert!(r.holds());
        assert!((r.fitted_c - 0.5).abs() < 1e-12 && (r.tightest_c - 0.5).abs() < 1e-12);
        assert!(r.residuals.iter().all(|x| x.abs() < 1e-6));
        let empty = [p(4, 0, 0), p(8, 0, 0), p(16, 0, 0)];
        let r = complexity_fit(&empty).unwrap();
        assert!(r.holds() && r.fitted_c == 0.0 && r.tightest_c == 0.0);
        let bad = complexity_fit(&[p(4, 2, 5), p(8, 32, 64), p(16, 512, 4096)]).unwrap();
        assert_eq!(bad.violations, vec![0]);
    }
}
