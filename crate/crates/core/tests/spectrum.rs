use nalgebra::DMatrix;
use nmqsd_core::linalg::{hermitian_eigenvalues, ComplexMatrix};
use nmqsd_core::oracle::{parse_spectrum_fixture, spectrum_fixture};
use nmqsd_core::spin::build_hamiltonian;
use nmqsd_core::{Boundary, ChainSpec};
use proptest::prelude::*;

const FIXTURE: &str = include_str!("fixtures/spectrum_n4_j1.txt");

/// Eigenvalues via the real symmetric embedding [[A, -B], [B, A]], where each
/// eigenvalue of A + iB appears twice.
fn embedded_eigenvalues(h: &ComplexMatrix) -> Vec<f64> {
    let n = h.dim();
    let big = DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let z = h[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let mut vals: Vec<f64> = big.symmetric_eigen().eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| a.total_cmp(b));
    vals.into_iter().step_by(2).collect()
}

fn assert_close(a: &[f64], b: &[f64], tol: f64) {
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(b) {
        assert!((x - y).abs() <= tol, "{x} vs {y}");
    }
}

#[test]
fn committed_fixture_matches() {
    let (chain, want) = parse_spectrum_fixture(FIXTURE).unwrap();
    assert_eq!(chain, ChainSpec::default());
    assert_close(&spectrum_fixture(&chain).unwrap(), &want, 1e-10);
}

#[test]
fn xx_ring_top_of_spectrum() {
    let vals = embedded_eigenvalues(&build_hamiltonian(&ChainSpec::default()).unwrap());
    assert!((vals[15] - 4.0 * 2f64.sqrt()).abs() < 1e-10);
    assert!((vals[0] + 4.0 * 2f64.sqrt()).abs() < 1e-10);
}

#[test]
fn field_free_spectrum_is_symmetric() {
    for dz in [0.0, 0.4, 1.0] {
        let c = ChainSpec {
            dm_strength: dz,
            ..Default::default()
        };
        let vals = spectrum_fixture(&c).unwrap();
        for (lo, hi) in vals.iter().zip(vals.iter().rev()) {
            assert!((lo + hi).abs() < 1e-10);
        }
    }
}

#[test]
fn two_site_open_chain() {
    let (j, dz, bz) = (0.7, 0.4, 1.3);
    let c = ChainSpec {
        n_sites: 2,
        j_coupling: j,
        dm_strength: dz,
        field_strength: bz,
        boundary: Boundary::Open,
    };
    let hop = 2.0 * (j * j + dz * dz).sqrt();
    let mut want = vec![-2.0 * bz, 2.0 * bz, -hop, hop];
    want.sort_by(|a, b| a.total_cmp(b));
    assert_close(&spectrum_fixture(&c).unwrap(), &want, 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn jacobi_matches_embedding_oracle(
        n in 2usize..=5,
        j in 0.1f64..2.0,
        dz in 0.0f64..1.0,
        bz in -3.0f64..3.0,
        open in any::<bool>(),
    ) {
        let c = ChainSpec {
            n_sites: n,
            j_coupling: j,
            dm_strength: dz,
            field_strength: bz,
            boundary: if open { Boundary::Open } else { Boundary::Periodic },
        };
        let h = build_hamiltonian(&c).unwrap();
        let ours = hermitian_eigenvalues(&h).unwrap();
        let theirs = embedded_eigenvalues(&h);
        for (x, y) in ours.iter().zip(&theirs) {
            prop_assert!((x - y).abs() < 1e-9);
        }
        let trace: f64 = ours.iter().sum();
        prop_assert!(trace.abs() < 1e-9);
    }
}
