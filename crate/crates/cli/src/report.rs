//! Aggregates sweep rows into per-cell means, runtimes normalised against
//! `naive_dense`, pairwise speedups and operation-count ratios.

use std::collections::BTreeMap;
use std::fmt::Write;

use anyhow::bail;
use sparsefhe_core::MatmulMethod;

use crate::record::BenchRecord;

/// Mean and sample standard deviation over the repetitions of one method in
/// one cell.
#[derive(Clone, Debug, PartialEq)]
pub struct MethodStats {
    pub reps: usize,
    pub mean_ms: f64,
    pub stddev_ms: f64,
    pub ct_ct_mults: f64,
    pub rotations: f64,
    pub max_error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellSummary {
    pub n: usize,
    pub sparsity: f64,
    pub methods: BTreeMap<MatmulMethod, MethodStats>,
}

impl CellSummary {
    /// Mean wall time of `method` divided by that of `naive_dense`.
    pub fn normalized(&self, method: MatmulMethod) -> Option<f64> {
        ratio(
            self.methods.get(&method)?.mean_ms,
            self.methods.get(&MatmulMethod::NaiveDense)?.mean_ms,
        )
    }

    /// How many times faster `method` runs than `baseline`.
    pub fn speedup(&self, method: MatmulMethod, baseline: MatmulMethod) -> Option<f64> {
        ratio(
            self.methods.get(&baseline)?.mean_ms,
            self.methods.get(&method)?.mean_ms,
        )
    }

    /// `ct_ct_mults` of `method` relative to `naive_dense`.
    pub fn mult_ratio(&self, method: MatmulMethod) -> Option<f64> {
        ratio(
            self.methods.get(&method)?.ct_ct_mults,
            self.methods.get(&MatmulMethod::NaiveDense)?.ct_ct_mults,
        )
    }
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    (den > 0.0).then(|| num / den)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub cells: Vec<CellSummary>,
    pub methods: Vec<MatmulMethod>,
}

impl Report {
    pub fn from_records(records: &[BenchRecord]) -> anyhow::Result<Self> {
        if records.is_empty() {
            bail!("no rows to report on");
        }
        let mut groups: BTreeMap<(usize, u64), BTreeMap<MatmulMethod, Vec<&BenchRecord>>> =
            BTreeMap::new();
        for r in records {
            groups
                .entry((r.n, r.sparsity.to_bits()))
                .or_default()
                .entry(r.method()?)
                .or_default()
                .push(r);
        }
        let mut methods: Vec<MatmulMethod> =
            groups.values().flat_map(|g| g.keys().copied()).collect();
        methods.sort();
        methods.dedup();
        let mut cells: Vec<CellSummary> = groups
            .into_iter()
            .map(|((n, bits), by_method)| CellSummary {
                n,
                sparsity: f64::from_bits(bits),
                methods: by_method
                    .into_iter()
                    .map(|(m, rows)| (m, stats(&rows)))
                    .collect(),
            })
            .collect();
        cells.sort_by(|a, b| {
            (a.n, a.sparsity)
                .partial_cmp(&(b.n, b.sparsity))
                .expect("finite sparsity")
        });
        Ok(Self { cells, methods })
    }

    pub fn cell(&self, n: usize, sparsity: f64) -> Option<&CellSummary> {
        self.cells
            .iter()
            .find(|c| c.n == n && c.sparsity == sparsity)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let fmt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.3}"));

        let _ = writeln!(
            s,
            "Mean wall time in ms (stddev), normalised to naive_dense"
        );
        let _ = write!(s, "{:>4} {:>8}", "N", "sparsity");
        for m in &self.methods {
            let _ = write!(s, " {:>30}", m.name());
        }
        let _ = writeln!(s);
        for c in &self.cells {
            let _ = write!(s, "{:>4} {:>8.2}", c.n, c.sparsity);
            for m in &self.methods {
                let cell = match c.methods.get(m) {
                    Some(st) => format!(
                        "{:.3} ({:.3}) {}",
                        st.mean_ms,
                        st.stddev_ms,
                        fmt(c.normalized(*m))
                    ),
                    None => "-".into(),
                };
                let _ = write!(s, " {cell:>30}");
            }
            let _ = writeln!(s);
        }

        let pairs: Vec<(MatmulMethod, MatmulMethod)> = self
            .methods
            .iter()
            .enumerate()
            .flat_map(|(i, &a)| self.methods[i + 1..].iter().map(move |&b| (b, a)))
            .collect();
        if !pairs.is_empty() {
            let _ = writeln!(s, "\nSpeedup (row method over column baseline)");
            let _ = write!(s, "{:>4} {:>8}", "N", "sparsity");
            for (m, base) in &pairs {
                let _ = write!(s, " {:>26}", format!("{}/{}", m.name(), base.name()));
            }
            let _ = writeln!(s);
            for c in &self.cells {
                let _ = write!(s, "{:>4} {:>8.2}", c.n, c.sparsity);
                for &(m, base) in &pairs {
                    let _ = write!(s, " {:>26}", fmt(c.speedup(m, base)));
                }
                let _ = writeln!(s);
            }
        }

        let _ = writeln!(s, "\nMean ct-ct multiplications (ratio to naive_dense)");
        let _ = write!(s, "{:>4} {:>8}", "N", "sparsity");
        for m in &self.methods {
            let _ = write!(s, " {:>20}", m.name());
        }
        let _ = writeln!(s);
        for c in &self.cells {
            let _ = write!(s, "{:>4} {:>8.2}", c.n, c.sparsity);
            for m in &self.methods {
                let cell = match c.methods.get(m) {
                    Some(st) => format!("{:.0} ({})", st.ct_ct_mults, fmt(c.mult_ratio(*m))),
                    None => "-".into(),
                };
                let _ = write!(s, " {cell:>20}");
            }
            let _ = writeln!(s);
        }
        s
    }
}

fn stats(rows: &[&BenchRecord]) -> MethodStats {
    let k = rows.len() as f64;
    let mean = |f: fn(&BenchRecord) -> f64| rows.iter().map(|r| f(r)).sum::<f64>() / k;
    let mean_ms = mean(|r| r.wall_ms);
    let var = if rows.len() > 1 {
        rows.iter()
            .map(|r| (r.wall_ms - mean_ms).powi(2))
            .sum::<f64>()
            / (k - 1.0)
    } else {
        0.0
    };
    MethodStats {
        reps: rows.len(),
        mean_ms,
        stddev_ms: var.sqrt(),
        ct_ct_mults: mean(|r| r.ct_ct_mults as f64),
        rotations: mean(|r| r.rotations as f64),
        max_error: rows.iter().map(|r| r.frobenius_error).fold(0.0, f64::max),
    }
}
