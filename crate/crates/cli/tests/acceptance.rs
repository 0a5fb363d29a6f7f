//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sparsefhe_cli::config::default_sparsities;
use sparsefhe_cli::record::write_csv;
use sparsefhe_cli::sweep::{prepare_cells, Cell};
use sparsefhe_cli::{run_sweep, BenchConfig, Harness, RunResult};
use sparsefhe_core::metrics::{complexity_fit, ComplexityPoint};
use sparsefhe_core::{frobenius_error, predicted_op_counts, CkksContext, CkksParams, MatmulMethod};

const ACCURACY_TOL: f64 = 1e-6;
const AGREEMENT_TOL: f64 = 2e-6;
const ROUNDTRIP_TOL: f64 = 1e-8;
const PRIMITIVE_TOL: f64 = 1e-6;
const PRIMITIVE_CASES: usize = 1000;

use MatmulMethod::{CsrC, NaiveDense, NaiveSparse, VcsrC};

struct Sweep {
    config: BenchConfig,
    cells: Vec<Cell>,
    runs: Vec<RunResult>,
}

impl Sweep {
    fn run(harness: &mut Harness, config: BenchConfig) -> Self {
        let t = Instant::now();
        let cells = prepare_cells(&config).expect("cells");
        let runs = run_sweep(harness, &config).expect("sweep");
        eprintln!(
            "  swept sizes {:?} seed {} nested {} methods {:?}: {} runs in {:.1}s",
            config.sizes,
            config.seed,
            config.nested,
            config.methods.iter().map(|m| m.name()).collect::<Vec<_>>(),
            runs.len(),
            t.elapsed().as_secs_f64()
        );
        Self {
            config,
            cells,
            runs,
        }
    }

    /// `(cell, method, run)` for every run, in sweep order.
    fn iter(&self) -> impl Iterator<Item = (&Cell, MatmulMethod, &RunResult)> {
        let per_cell = self.config.methods.len() * self.config.reps as usize;
        self.runs.iter().enumerate().map(move |(i, r)| {
            let cell = &self.cells[i / per_cell];
            (cell, r.record.method().expect("method"), r)
        })
    }
}

type Check<'a> = Box<dyn FnOnce() -> Outcome + 'a>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn config(sizes: &[usize], methods: &[MatmulMethod], seed: u64) -> BenchConfig {
    BenchConfig {
        sizes: sizes.to_vec(),
        sparsities: default_sparsities(),
        reps: 1,
        methods: methods.to_vec(),
        seed,
        trace: true,
        ..Default::default()
    }
}

fn accuracy(sweeps: &[&Sweep]) -> Outcome {
    let mut worst = 0.0f64;
    let mut count = 0;
    let mut seeds = std::collections::BTreeSet::new();
    for s in sweeps {
        for (_, _, r) in s.iter().filter(|(_, m, _)| matches!(m, CsrC | VcsrC)) {
            worst = worst.max(r.record.frobenius_error);
            count += 1;
            seeds.insert(s.config.seed);
        }
    }
    outcome(
        worst < ACCURACY_TOL && seeds.len() == 5,
        format!("max Frobenius error {worst:.3e} over {count} csr_c/vcsr_c runs, seeds {seeds:?} (tolerance {ACCURACY_TOL:e})"),
    )
}

fn exact_zero(sweeps: &[&Sweep]) -> Outcome {
    let mut bad = Vec::new();
    let mut count = 0;
    for s in sweeps {
        for (cell, m, r) in s
            .iter()
            .filter(|(c, m, _)| c.sparsity == 1.0 && matches!(m, CsrC | VcsrC))
        {
            count += 1;
            if r.record.frobenius_error != 0.0 || r.counter.ct_ct_mults != 0 {
                bad.push(format!("{m} N={} seed={}", cell.n, s.config.seed));
            }
        }
    }
    outcome(
        bad.is_empty() && count > 0,
        format!(
            "{count} fully sparse runs, error exactly 0 and no ct-ct products; failures {bad:?}"
        ),
    )
}

fn count_law(sweeps: &[&Sweep]) -> Outcome {
    let mut mismatches = Vec::new();
    let mut dense_bad = Vec::new();
    let mut points = Vec::new();
    let mut sizes = std::collections::BTreeSet::new();
    let mut count = 0;
    for s in sweeps {
        for (cell, m, r) in s.iter() {
            count += 1;
            let p = predicted_op_counts(
                &cell.a,
                &cell.b,
                m,
                s.config.skip_rule,
                s.config.slice_height,
            )
            .expect("prediction");
            if r.counter.ct_ct_mults != p.matching_pairs {
                mismatches.push(format!(
                    "{m} N={} s={} {} vs {}",
                    cell.n, cell.sparsity, r.counter.ct_ct_mults, p.matching_pairs
                ));
            }
            if cell.sparsity == 0.0 && r.counter.ct_ct_mults != (cell.n as u64).pow(3) {
                dense_bad.push(format!("{m} N={}", cell.n));
            }
            if matches!(m, CsrC | VcsrC) {
                sizes.insert(cell.n);
                points.push(ComplexityPoint {
                    n: cell.n,
                    k: p.k,
                    matching_pairs: r.counter.ct_ct_mults,
                });
            }
        }
    }
    let fit = complexity_fit(&points).expect("complexity fit");
    outcome(
        mismatches.is_empty() && dense_bad.is_empty() && fit.holds() && sizes.len() >= 3,
        format!(
            "{count} runs match the predictor exactly ({} mismatches); dense inputs give N^3 ({} failures); \
             N*k bound over N in {sizes:?}: fitted c {:.4}, tightest c {:.4}, bound {}, {} violations",
            mismatches.len(),
            dense_bad.len(),
            fit.fitted_c,
            fit.tightest_c,
            sparsefhe_core::metrics::ComplexityReport::BOUND_C,
            fit.violations.len()
        ),
    )
}

fn rotation_discipline(sweeps: &[&Sweep]) -> Outcome {
    let (mut pairs, mut aligned, mut bad) = (0u64, 0u64, Vec::new());
    for s in sweeps {
        for (cell, m, r) in s.iter() {
            let trace = r.trace.as_ref().expect("sweeps run with traces");
            let align: u64 = trace.iter().map(|t| t.align_steps.len() as u64).sum();
            let accum: u64 = trace.iter().map(|t| t.accum_steps.len() as u64).sum();
            if align != r.counter.align_rotations
                || accum != r.counter.accum_rotations
                || r.counter.rotations != align + accum
            {
                bad.push(format!(
                    "{m} N={} s={}: trace disagrees with counters",
                    cell.n, cell.sparsity
                ));
            }
            for t in trace {
                pairs += 1;
                let same = t.pair.a_pos == t.pair.b_pos;
                aligned += same as u64;
                if t.align_steps.len() > 1
                    || t.accum_steps.len() > 1
                    || (same && !t.align_steps.is_empty())
                {
                    bad.push(format!("{m} N={} pair {:?}", cell.n, t.pair));
                }
            }
        }
    }
    outcome(
        bad.is_empty() && pairs > 0 && aligned > 0,
        format!(
            "{pairs} scalar products traced, {aligned} already aligned; {} violations {:?}",
            bad.len(),
            bad.iter().take(3).collect::<Vec<_>>()
        ),
    )
}

fn agreement(sweep: &Sweep) -> Outcome {
    let mut by_cell: BTreeMap<(usize, u64), Vec<&RunResult>> = BTreeMap::new();
    for (cell, _, r) in sweep.iter() {
        by_cell
            .entry((cell.n, cell.sparsity.to_bits()))
            .or_default()
            .push(r);
    }
    let mut worst = 0.0f64;
    let mut complete = true;
    for runs in by_cell.values() {
        complete &= runs.len() == MatmulMethod::ALL.len();
        for (i, x) in runs.iter().enumerate() {
            for y in &runs[i + 1..] {
                worst = worst.max(frobenius_error(&x.product, &y.product).expect("same size"));
            }
        }
    }
    outcome(
        worst < AGREEMENT_TOL && complete,
        format!("max pairwise distance {worst:.3e} across {} cells x 4 methods (tolerance {AGREEMENT_TOL:e})", by_cell.len()),
    )
}

fn dense_flat(sweeps: &[&Sweep]) -> Outcome {
    let mut by_n: BTreeMap<usize, Vec<&RunResult>> = BTreeMap::new();
    for s in sweeps {
        for (cell, _, r) in s.iter().filter(|(_, m, _)| *m == NaiveDense) {
            by_n.entry(cell.n).or_default().push(r);
        }
    }
    let flat = by_n
        .values()
        .all(|rs| rs.iter().all(|r| r.counter.same_counts(&rs[0].counter)));
    let summary: Vec<String> = by_n
        .iter()
        .map(|(n, rs)| {
            format!(
                "N={n}: {} runs, {} ct-ct",
                rs.len(),
                rs[0].counter.ct_ct_mults
            )
        })
        .collect();
    outcome(
        flat && !by_n.is_empty(),
        format!(
            "naive_dense counters identical across sparsities ({})",
            summary.join("; ")
        ),
    )
}

fn monotone(sweep: &Sweep) -> Outcome {
    let mut series: BTreeMap<(usize, MatmulMethod), Vec<(f64, &RunResult)>> = BTreeMap::new();
    for (cell, m, r) in sweep.iter() {
        series
            .entry((cell.n, m))
            .or_default()
            .push((cell.sparsity, r));
    }
    let mut bad = Vec::new();
    for ((n, m), rs) in &mut series {
        rs.sort_by(|a, b| a.0.total_cmp(&b.0));
        if *m == NaiveDense {
            continue;
        }
        for w in rs.windows(2) {
            if !w[1].1.counter.dominated_by(&w[0].1.counter) {
                bad.push(format!(
                    "{m} N={n} between sparsity {} and {}",
                    w[0].0, w[1].0
                ));
            }
        }
    }
    let mut beats = 0;
    for ((n, m), rs) in &series {
        if *m != CsrC {
            continue;
        }
        let dense = &series[&(*n, NaiveDense)];
        for ((s, r), (_, d)) in rs.iter().zip(dense) {
            if *s >= 0.1 {
                if r.counter.ct_ct_mults < d.counter.ct_ct_mults {
                    beats += 1;
                } else {
                    bad.push(format!("csr_c N={n} sparsity {s} not below naive_dense"));
                }
            }
        }
    }
    let methods_seen = [CsrC, VcsrC, NaiveSparse]
        .iter()
        .all(|m| series.keys().any(|(_, x)| x == m));
    outcome(
        bad.is_empty() && methods_seen && beats > 0,
        format!("nested sweep over N {:?}: counters non-increasing, csr_c below naive_dense in {beats} cells at sparsity >= 0.1; violations {bad:?}", sweep.config.sizes),
    )
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn primitives() -> Outcome {
    let params = CkksParams::default();
    let ctx = CkksContext::new(params.clone()).expect("context");
    let mut keys = ctx.keygen().expect("keys");
    let slots = ctx.slots();
    ctx.gen_galois_keys(&mut keys, 1..slots as i64)
        .expect("galois keys");
    let delta = params.default_scale();
    let top = ctx.top_level();
    let q_top = params.modulus_chain[top] as f64;
    let mut rng = ChaCha20Rng::seed_from_u64(8);
    let (mut rt, mut add, mut mul, mut rot, mut group) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut ledger_ok = true;
    for _ in 0..PRIMITIVE_CASES {
        let x: Vec<f64> = (0..slots).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let y: Vec<f64> = (0..slots).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let px = ctx.encode(&x, delta, top).unwrap();
        let py = ctx.encode(&y, delta, top).unwrap();
        rt = rt.max(max_diff(&ctx.decode(&px).unwrap(), &x));
        let cx = ctx.encrypt(&px, &keys, &mut rng).unwrap();
        let cy = ctx.encrypt(&py, &keys, &mut rng).unwrap();

        let sum = ctx.add(&cx, &cy).unwrap();
        let expect: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        add = add.max(max_diff(&ctx.decrypt_values(&sum, &keys).unwrap(), &expect));
        ledger_ok &= sum.scale() == delta && sum.level() == top;

        let prod = ctx.mul(&cx, &cy).unwrap();
        ledger_ok &= prod.degree() == 2 && prod.scale() == delta * delta && prod.level() == top;
        let prod = ctx.relinearize(&prod, &keys).unwrap();
        ledger_ok &= prod.degree() == 1 && prod.scale() == delta * delta && prod.level() == top;
        let prod = ctx.rescale(&prod).unwrap();
        ledger_ok &= prod.scale() == delta * delta / q_top && prod.level() == top - 1;
        let expect: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a * b).collect();
        mul = mul.max(max_diff(
            &ctx.decrypt_values(&prod, &keys).unwrap(),
            &expect,
        ));

        let k = rng.gen_range(1..slots as i64);
        let k2 = rng.gen_range(1..slots as i64);
        let r = ctx.rotate(&cx, k, &keys).unwrap();
        ledger_ok &= r.scale() == delta && r.level() == top;
        let expect: Vec<f64> = (0..slots).map(|i| x[(i + k as usize) % slots]).collect();
        rot = rot.max(max_diff(&ctx.decrypt_values(&r, &keys).unwrap(), &expect));

        let composed = ctx
            .decrypt_values(&ctx.rotate(&r, k2, &keys).unwrap(), &keys)
            .unwrap();
        let direct = ctx
            .decrypt_values(&ctx.rotate(&cx, k + k2, &keys).unwrap(), &keys)
            .unwrap();
        let back = ctx
            .decrypt_values(&ctx.rotate(&r, -k, &keys).unwrap(), &keys)
            .unwrap();
        group = group
            .max(max_diff(&composed, &direct))
            .max(max_diff(&back, &x));
    }
    let identity = ctx.rotate(
        &ctx.encrypt(&ctx.encode(&[1.0], delta, top).unwrap(), &keys, &mut rng)
            .unwrap(),
        slots as i64,
        &keys,
    );
    let identity_ok = identity
        .is_ok_and(|c| (ctx.decrypt_values(&c, &keys).unwrap()[0] - 1.0).abs() < PRIMITIVE_TOL);
    outcome(
        rt < ROUNDTRIP_TOL
            && add < PRIMITIVE_TOL
            && mul < PRIMITIVE_TOL
            && rot < PRIMITIVE_TOL
            && group < PRIMITIVE_TOL
            && ledger_ok
            && identity_ok,
        format!(
            "{PRIMITIVE_CASES} cases: roundtrip {rt:.2e}, add {add:.2e}, mult {mul:.2e}, rotate {rot:.2e}, \
             group law {group:.2e}; scale/level ledger exact: {ledger_ok}; rotation by slots is identity: {identity_ok}"
        ),
    )
}

fn reproducibility() -> Outcome {
    let cfg = BenchConfig {
        sizes: vec![4, 8],
        sparsities: vec![0.0, 0.3, 0.6, 0.9, 1.0],
        reps: 2,
        seed: 7,
        ..Default::default()
    };
    let csv = |jobs: usize| {
        let mut harness = Harness::new(CkksParams::default()).expect("harness");
        let runs = run_sweep(
            &mut harness,
            &BenchConfig {
                jobs,
                ..cfg.clone()
            },
        )
        .expect("sweep");
        let records: Vec<_> = runs.into_iter().map(|r| r.record).collect();
        let mut buf = Vec::new();
        write_csv(&mut buf, &records).expect("csv");
        String::from_utf8(buf).expect("utf8")
    };
    let strip = |text: &str| -> Vec<String> {
        text.lines()
            .map(|l| {
                l.split(',')
                    .enumerate()
                    .map(|(i, f)| if i == 4 { "" } else { f })
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect()
    };
    let first = csv(1);
    let second = csv(1);
    let threaded = csv(2);
    let same = strip(&first) == strip(&second);
    let same_threaded = strip(&first) == strip(&threaded);
    outcome(
        same && same_threaded,
        format!("{} rows; identical apart from wall_ms across two runs: {same}; and with 2 jobs: {same_threaded}", first.lines().count() - 1),
    )
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut harness = Harness::new(CkksParams::default()).expect("harness");

    eprintln!("running sweeps");
    let full = Sweep::run(&mut harness, config(&[8, 16], &MatmulMethod::ALL, 1));
    let extra: Vec<Sweep> = (2..=5)
        .map(|seed| Sweep::run(&mut harness, config(&[8, 16], &[CsrC, VcsrC], seed)))
        .collect();
    let nested = Sweep::run(
        &mut harness,
        BenchConfig {
            nested: true,
            ..config(&[4, 8, 16], &MatmulMethod::ALL, 1)
        },
    );

    let mut accuracy_sweeps = vec![&full];
    accuracy_sweeps.extend(extra.iter());
    let mut every = accuracy_sweeps.clone();
    every.push(&nested);

    let criteria: Vec<(&str, Check)> = vec![
        (
            "accuracy vs plaintext oracle",
            Box::new(|| accuracy(&accuracy_sweeps)),
        ),
        (
            "exact-zero degenerate case",
            Box::new(|| exact_zero(&accuracy_sweeps)),
        ),
        ("count law", Box::new(|| count_law(&every))),
        (
            "rotation discipline",
            Box::new(|| rotation_discipline(&every)),
        ),
        ("method agreement", Box::new(|| agreement(&full))),
        (
            "dense-method sparsity independence",
            Box::new(|| dense_flat(&[&full, &nested])),
        ),
        ("sparsity monotonicity", Box::new(|| monotone(&nested))),
        ("CKKS primitive suite", Box::new(primitives)),
        ("reproducibility", Box::new(reproducibility)),
    ];

    let mut failed = 0;
    for (i, (name, check)) in criteria.into_iter().enumerate() {
        let t = Instant::now();
        let o = check();
        failed += !o.pass as usize;
        println!(
            "criterion {} {:<36} {}  {} [{:.1}s]",
            i + 1,
            name,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            t.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {} of 9 criteria passed in {:.0}s",
        9 - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
