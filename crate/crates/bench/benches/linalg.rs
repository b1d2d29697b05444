use criterion::{black_box, criterion_group, criterion_main, Criterion};
use nmqsd_core::linalg::{expm_hermitian, hermitian_eig};
use nmqsd_core::spin::build_hamiltonian;
use nmqsd_core::ChainSpec;

fn eig(c: &mut Criterion) {
    for n in [4, 6] {
        let h = build_hamiltonian(&ChainSpec {
            n_sites: n,
            dm_strength: 0.3,
            field_strength: 1.0,
            ..Default::default()
        })
        .unwrap();
        c.bench_function(&format!("hermitian_eig n{n}"), |b| {
            b.iter(|| hermitian_eig(black_box(&h)).unwrap())
        });
    }
    let h = build_hamiltonian(&ChainSpec::default()).unwrap();
    c.bench_function("expm_hermitian n4", |b| {
        b.iter(|| expm_hermitian(black_box(&h), 0.7).unwrap())
    });
}

fn matmul(c: &mut Criterion) {
    let h = build_hamiltonian(&ChainSpec {
        dm_strength: 0.3,
        field_strength: 1.0,
        ..Default::default()
    })
    .unwrap();
    c.bench_function("matmul 16x16", |b| b.iter(|| black_box(&h).matmul(&h)));
}

criterion_group!(benches, eig, matmul);
criterion_main!(benches);
