use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use sparsefhe_core::enc::check_capacity;
use sparsefhe_core::sparse::{generate_random_sparse, DEFAULT_SLICE_HEIGHT};
use sparsefhe_core::{CkksParams, DenseMatrix, MatmulMethod, SkipRule};

/// Environment variable naming the default parameter file.
pub const PARAMS_ENV: &str = "SPARSEFHE_PARAMS";

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub sparsities: Vec<f64>,
    pub reps: u32,
    pub methods: Vec<MatmulMethod>,
    pub params: CkksParams,
    pub seed: u64,
    /// Draw every sparsity level of a size from one nested family, so each
    /// level zeroes a superset of the previous level's entries.
    pub nested: bool,
    pub jobs: usize,
    pub slice_height: usize,
    pub skip_rule: SkipRule,
    /// Keep the rotations issued for every scalar product.
    pub trace: bool,
    pub out: PathBuf,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            sizes: vec![8, 16],
            sparsities: default_sparsities(),
            reps: 5,
            methods: MatmulMethod::ALL.to_vec(),
            params: CkksParams::default(),
            seed: 1,
            nested: false,
            jobs: 1,
            slice_height: DEFAULT_SLICE_HEIGHT,
            skip_rule: SkipRule::default(),
            trace: false,
            out: PathBuf::from("sweep.csv"),
        }
    }
}

/// `0.0, 0.1, ..., 1.0`.
pub fn default_sparsities() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

impl BenchConfig {
    pub fn validate(&self) -> anyhow::Result<()> {
        if self.sizes.is_empty() || self.sparsities.is_empty() || self.methods.is_empty() {
            bail!("sizes, sparsities and methods must be non-empty");
        }
        if self.reps == 0 {
            bail!("reps must be at least 1");
        }
        if self.jobs == 0 {
            bail!("jobs must be at least 1");
        }
        if self.slice_height == 0 {
            bail!("slice height must be at least 1");
        }
        self.params.validate()?;
        for &n in &self.sizes {
            if n == 0 {
                bail!("matrix size must be at least 1");
            }
            check_capacity(n, self.params.slots())?;
        }
        for &s in &self.sparsities {
            if !(0.0..=1.0).contains(&s) {
                bail!("sparsity {s} outside [0, 1]");
            }
        }
        Ok(())
    }

    /// Number of CSV rows a sweep produces.
    pub fn row_count(&self) -> usize {
        self.sizes.len() * self.sparsities.len() * self.methods.len() * self.reps as usize
    }
}

/// Loads parameters from `path`, falling back to the file named by
/// [`PARAMS_ENV`] and then to the built-in defaults.
pub fn load_params(path: Option<&Path>) -> anyhow::Result<CkksParams> {
    let path = match path {
        Some(p) => Some(p.to_path_buf()),
        None => std::env::var_os(PARAMS_ENV).map(PathBuf::from),
    };
    match path {
        Some(p) => {
            let text =
                std::fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?;
            CkksParams::from_kv_str(&text).with_context(|| format!("parsing {}", p.display()))
        }
        None => Ok(CkksParams::default()),
    }
}

/// Deterministic sub-seed: splitmix64 folded over `parts`.
pub fn sub_seed(master: u64, parts: &[u64]) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    parts.iter().fold(mix(master), |acc, &p| mix(acc ^ mix(p)))
}

/// The operand pair for one `(N, sparsity)` cell, drawn independently.
pub fn matrix_pair(
    dim: usize,
    sparsity: f64,
    seed: u64,
) -> sparsefhe_core::Result<(DenseMatrix, DenseMatrix)> {
    Ok((
        generate_random_sparse(dim, sparsity, sub_seed(seed, &[0]))?,
        generate_random_sparse(dim, sparsity, sub_seed(seed, &[1]))?,
    ))
}
