use std::io::{Read, Write};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};
use sparsefhe_core::{MatmulMethod, OpCounter};

/// One CSV row: a single timed multiplication.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub method: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub sparsity: f64,
    /// 1-based.
    pub rep: u32,
    pub wall_ms: f64,
    pub ct_ct_mults: u64,
    pub pt_mults: u64,
    pub rotations: u64,
    pub relins: u64,
    pub relin_noops: u64,
    pub rescales: u64,
    pub adds: u64,
    pub frobenius_error: f64,
    pub seed: u64,
}

impl BenchRecord {
    pub fn new(
        method: MatmulMethod,
        n: usize,
        sparsity: f64,
        rep: u32,
        counter: &OpCounter,
        frobenius_error: f64,
        seed: u64,
    ) -> Self {
        Self {
            method: method.name().to_string(),
            n,
            sparsity,
            rep,
            wall_ms: counter.wall_time.as_secs_f64() * 1e3,
            ct_ct_mults: counter.ct_ct_mults,
            pt_mults: counter.pt_mults,
            rotations: counter.rotations,
            relins: counter.relins,
            relin_noops: counter.relin_noops,
            rescales: counter.rescales,
            adds: counter.adds,
            frobenius_error,
            seed,
        }
    }

    pub fn method(&self) -> anyhow::Result<MatmulMethod> {
        Ok(self.method.parse()?)
    }

    /// The same record with the timing column cleared.
    pub fn without_timing(&self) -> Self {
        Self {
            wall_ms: 0.0,
            ..self.clone()
        }
    }

    fn check(&self) -> anyhow::Result<()> {
        self.method()?;
        if self.rep == 0 {
            bail!("rep must be at least 1");
        }
        if self.frobenius_error.is_nan() || self.frobenius_error < 0.0 {
            bail!("negative or NaN frobenius_error {}", self.frobenius_error);
        }
        if !(0.0..=1.0).contains(&self.sparsity) {
            bail!("sparsity {} outside [0, 1]", self.sparsity);
        }
        if self.wall_ms.is_nan() || self.wall_ms < 0.0 {
            bail!("negative or NaN wall_ms {}", self.wall_ms);
        }
        Ok(())
    }
}

pub fn write_csv(w: impl Write, records: &[BenchRecord]) -> anyhow::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in records {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

/// Reads and validates sweep rows.
pub fn read_csv(r: impl Read) -> anyhow::Result<Vec<BenchRecord>> {
    let mut input = csv::Reader::from_reader(r);
    input
        .deserialize()
        .enumerate()
        .map(|(i, row)| {
            let rec: BenchRecord = row.with_context(|| format!("row {}", i + 1))?;
            rec.check().with_context(|| format!("row {}", i + 1))?;
            Ok(rec)
        })
        .collect()
}
