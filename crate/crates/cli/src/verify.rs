//! Runs every method on one operand pair and checks accuracy against the
//! plaintext product and operation counts against the predictor.

use std::fmt::Write;

use sparsefhe_core::{
    frobenius_error, plain_matmul, predicted_op_counts, DenseMatrix, EngineOptions, MatmulMethod,
    OpCounter, PredictedCounts, SkipRule,
};

use crate::config::sub_seed;
use crate::sweep::Harness;

/// Largest accepted Frobenius error against the plaintext product.
pub const ERROR_TOLERANCE: f64 = 1e-6;
/// Largest accepted Frobenius distance between two methods' results.
pub const AGREEMENT_TOLERANCE: f64 = 2e-6;

#[derive(Clone, Debug)]
pub struct MethodCheck {
    pub method: MatmulMethod,
    pub error: f64,
    pub measured: OpCounter,
    pub predicted: PredictedCounts,
    pub product: DenseMatrix,
}

impl MethodCheck {
    /// `(name, measured - predicted)` for each predicted count.
    pub fn count_deltas(&self) -> [(&'static str, i64); 3] {
        let d = |m: u64, p: u64| m as i64 - p as i64;
        [
            (
                "ct_ct_mults",
                d(self.measured.ct_ct_mults, self.predicted.matching_pairs),
            ),
            (
                "align_rotations",
                d(
                    self.measured.align_rotations,
                    self.predicted.alignment_rotations,
                ),
            ),
            (
                "accum_rotations",
                d(
                    self.measured.accum_rotations,
                    self.predicted.accumulation_rotations,
                ),
            ),
        ]
    }

    pub fn passed(&self) -> bool {
        self.error < ERROR_TOLERANCE && self.count_deltas().iter().all(|&(_, d)| d == 0)
    }
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub checks: Vec<MethodCheck>,
    /// Largest Frobenius distance between any two methods' results.
    pub max_disagreement: f64,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(MethodCheck::passed) && self.max_disagreement < AGREEMENT_TOLERANCE
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let deltas: Vec<String> = c
                .count_deltas()
                .iter()
                .map(|(k, d)| format!("{k} {d:+}"))
                .collect();
            let _ = writeln!(
                s,
                "{:<12} {} error {:.3e}  ct_ct_mults {}  deltas: {}",
                c.method.name(),
                if c.passed() { "PASS" } else { "FAIL" },
                c.error,
                c.measured.ct_ct_mults,
                deltas.join(", ")
            );
        }
        let _ = writeln!(
            s,
            "{:<12} {} max pairwise distance {:.3e}",
            "agreement",
            if self.max_disagreement < AGREEMENT_TOLERANCE {
                "PASS"
            } else {
                "FAIL"
            },
            self.max_disagreement
        );
        s
    }
}

/// Generates the needed rotation keys and runs `methods` on `a * b`.
pub fn verify_pair(
    harness: &mut Harness,
    a: &DenseMatrix,
    b: &DenseMatrix,
    methods: &[MatmulMethod],
    skip_rule: SkipRule,
    slice_height: usize,
    seed: u64,
) -> anyhow::Result<VerifyReport> {
    harness.prepare(a, b, methods, slice_height)?;
    let expected = plain_matmul(a, b)?;
    let options = EngineOptions {
        skip_rule,
        trace: false,
    };
    let mut checks = Vec::with_capacity(methods.len());
    for (i, &method) in methods.iter().enumerate() {
        let (product, out) = harness.run(
            method,
            a,
            b,
            options,
            slice_height,
            sub_seed(seed, &[i as u64]),
        )?;
        checks.push(MethodCheck {
            method,
            error: frobenius_error(&product, &expected)?,
            measured: out.counter,
            predicted: predicted_op_counts(a, b, method, skip_rule, slice_height)?,
            product,
        });
    }
    let mut max_disagreement = 0.0f64;
    for (i, x) in checks.iter().enumerate() {
        for y in &checks[i + 1..] {
            max_disagreement = max_disagreement.max(frobenius_error(&x.product, &y.product)?);
        }
    }
    Ok(VerifyReport {
        checks,
        max_disagreement,
    })
}
