use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use sparsefhe_cli::config::{default_sparsities, load_params, PARAMS_ENV};
use sparsefhe_cli::files::{load_matrix, write_pair};
use sparsefhe_cli::record::{read_csv, write_csv};
use sparsefhe_cli::{matrix_pair, run_sweep, verify_pair, BenchConfig, Harness, Report};
use sparsefhe_core::enc::check_capacity;
use sparsefhe_core::sparse::DEFAULT_SLICE_HEIGHT;
use sparsefhe_core::{MatmulMethod, SkipRule};

/// Encrypted sparse matrix multiplication benchmarks.
#[derive(Parser)]
#[command(version)]
struct Cli {
    /// Parameter file with ring_degree, scale_bits, levels and seed.
    #[arg(long, global = true, env = PARAMS_ENV)]
    params: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random operand pair as a.mtx and b.mtx.
    Gen {
        #[arg(long)]
        size: usize,
        #[arg(long)]
        sparsity: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Time every method over a grid of sizes and sparsities.
    Sweep(SweepArgs),
    /// Check every method on one pair against the plaintext product.
    Verify(VerifyArgs),
    /// Summarise a sweep CSV.
    Report { csv: PathBuf },
}

#[derive(Args)]
struct MethodArgs {
    /// Comma-separated method names.
    #[arg(long, value_delimiter = ',', default_values_t = MatmulMethod::ALL)]
    methods: Vec<MatmulMethod>,
    /// Rows per slice for vcsr_c.
    #[arg(long, default_value_t = DEFAULT_SLICE_HEIGHT)]
    slice_height: usize,
    /// naive_sparse skips a product only when both operands are zero.
    #[arg(long)]
    skip_both: bool,
}

impl MethodArgs {
    fn skip_rule(&self) -> SkipRule {
        if self.skip_both {
            SkipRule::Both
        } else {
            SkipRule::Either
        }
    }
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [8, 16])]
    sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = default_sparsities())]
    sparsities: Vec<f64>,
    #[arg(long, default_value_t = 5)]
    reps: u32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Nested sparsity patterns: each level zeroes a superset of the last.
    #[arg(long)]
    nested: bool,
    /// Worker threads; 1 runs everything sequentially.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, default_value = "sweep.csv")]
    out: PathBuf,
    #[command(flatten)]
    methods: MethodArgs,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 16)]
    size: usize,
    #[arg(long, default_value_t = 0.5)]
    sparsity: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Left operand file (.mtx or .csv) instead of a generated one.
    #[arg(long, requires = "b")]
    a: Option<PathBuf>,
    /// Right operand file (.mtx or .csv).
    #[arg(long, requires = "a")]
    b: Option<PathBuf>,
    #[command(flatten)]
    methods: MethodArgs,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Gen {
            size,
            sparsity,
            seed,
            out,
        } => {
            for p in write_pair(&out, size, sparsity, seed)? {
                println!("{}", p.display());
            }
        }
        Command::Sweep(args) => {
            let config = BenchConfig {
                sizes: args.sizes,
                sparsities: args.sparsities,
                reps: args.reps,
                skip_rule: args.methods.skip_rule(),
                methods: args.methods.methods,
                params: load_params(cli.params.as_deref())?,
                seed: args.seed,
                nested: args.nested,
                jobs: args.jobs,
                slice_height: args.methods.slice_height,
                trace: false,
                out: args.out,
            };
            let mut harness = Harness::new(config.params.clone())?;
            let runs = run_sweep(&mut harness, &config)?;
            let records: Vec<_> = runs.into_iter().map(|r| r.record).collect();
            let file = File::create(&config.out)
                .with_context(|| format!("creating {}", config.out.display()))?;
            write_csv(BufWriter::new(file), &records)?;
            print!("{}", Report::from_records(&records)?.render());
            println!(
                "\n{} rows written to {}",
                records.len(),
                config.out.display()
            );
        }
        Command::Verify(args) => {
            let params = load_params(cli.params.as_deref())?;
            let (a, b) = match (&args.a, &args.b) {
                (Some(pa), Some(pb)) => (load_matrix(pa)?, load_matrix(pb)?),
                _ => matrix_pair(args.size, args.sparsity, args.seed)?,
            };
            check_capacity(a.dim(), params.slots())?;
            let mut harness = Harness::new(params)?;
            let skip = args.methods.skip_rule();
            let report = verify_pair(
                &mut harness,
                &a,
                &b,
                &args.methods.methods,
                skip,
                args.methods.slice_height,
                args.seed,
            )?;
            print!("{}", report.render());
            return Ok(report.passed());
        }
        Command::Report { csv } => {
            let file = File::open(&csv).with_context(|| format!("opening {}", csv.display()))?;
            let records = read_csv(file).with_context(|| format!("reading {}", csv.display()))?;
            print!("{}", Report::from_records(&records)?.render());
        }
    }
    Ok(true)
}
