use criterion::{black_box, criterion_group, criterion_main, Criterion};
use sparsefhe_bench::{context_with_steps, random_ciphertext};
use sparsefhe_core::ckks::arith::Modulus;
use sparsefhe_core::ckks::NttTable;
use sparsefhe_core::CkksParams;

fn ntt(c: &mut Criterion) {
    let params = CkksParams::default();
    let n = params.ring_degree;
    let table =
        NttTable::new(Modulus::new(params.modulus_chain[0]), n).expect("NTT-friendly prime");
    let q = params.modulus_chain[0];
    let mut a: Vec<u64> = (0..n as u64).map(|i| (i * 0x9e37_79b9) % q).collect();
    c.bench_function("ntt_forward_1024", |b| {
        b.iter(|| table.forward(black_box(&mut a)))
    });
    c.bench_function("ntt_inverse_1024", |b| {
        b.iter(|| table.inverse(black_box(&mut a)))
    });
}

fn ckks(c: &mut Criterion) {
    let (ctx, keys) = context_with_steps([1, 37]);
    let x = random_ciphertext(&ctx, &keys, 1);
    let y = random_ciphertext(&ctx, &keys, 2);
    c.bench_function("add", |b| b.iter(|| ctx.add(black_box(&x), &y).unwrap()));
    c.bench_function("mul_relin", |b| {
        b.iter(|| {
            ctx.relinearize(&ctx.mul(black_box(&x), &y).unwrap(), &keys)
                .unwrap()
        })
    });
    let prod = ctx.relinearize(&ctx.mul(&x, &y).unwrap(), &keys).unwrap();
    c.bench_function("rescale", |b| {
        b.iter(|| ctx.rescale(black_box(&prod)).unwrap())
    });
    c.bench_function("rotate", |b| {
        b.iter(|| ctx.rotate(black_box(&x), 37, &keys).unwrap())
    });
    let hoisted = ctx.hoist(&x).unwrap();
    c.bench_function("rotate_hoisted", |b| {
        b.iter(|| ctx.rotate_hoisted(black_box(&hoisted), 37, &keys).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(30);
    targets = ntt, ckks
}
criterion_main!(benches);
