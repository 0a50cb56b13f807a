//! Eigensolvers against reconstruction identities and closed forms.

use proptest::prelude::*;
use rmt_infer::simulate::{replicate_rng, Normal};
use rmt_infer::linalg::lu_determinant;
use rmt_infer::{cholesky, generalized_eig, sym_eig, Matrix, SymMatrix};

fn random_spd(order: usize, seed: u64) -> SymMatrix {
    let mut g = Normal::new(replicate_rng(seed, 0));
    let x = Matrix::from_fn(order, order + 3, |_, _| g.sample());
    x.row_gram()
}

#[test]
fn eigendecomposition_reconstructs_the_matrix() {
    for (order, seed) in [(1, 1), (5, 2), (40, 3), (120, 4)] {
        let a = random_spd(order, seed);
        let spec = sym_eig(&a, true).unwrap();
        let v = spec.vectors.as_ref().unwrap();
        let scale = a.frobenius();
        for i in 0..order {
            for j in 0..=i {
                let rebuilt: f64 = (0..order).map(|k| v.get(i, k) * spec.values[k] * v.get(j, k)).sum();
                assert!((rebuilt - a.get(i, j)).abs() < 1e-11 * scale, "order {order}");
                let dot: f64 = (0..order).map(|k| v.get(k, i) * v.get(k, j)).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-11, "order {order}");
            }
        }
    }
}

#[test]
fn tridiagonal_toeplitz_closed_form() {
    // Eigenvalues of tridiag(-1, 2, -1) are 2 - 2 cos(k pi / (m + 1)).
    let m = 30;
    let a = SymMatrix::from_fn(m, |i, j| match i - j {
        0 => 2.0,
        1 => -1.0,
        _ => 0.0,
    });
    let spec = sym_eig(&a, false).unwrap();
    let mut want: Vec<f64> = (1..=m)
        .map(|k| 2.0 - 2.0 * (k as f64 * std::f64::consts::PI / (m as f64 + 1.0)).cos())
        .collect();
    want.sort_by(|a, b| b.total_cmp(a));
    for (got, want) in spec.values.iter().zip(&want) {
        assert!((got - want).abs() < 1e-12);
    }
}

#[test]
fn generalized_roots_factor_the_pencil_determinant() {
    // det(x m - a) / det(m) = prod_j (x - x_j) for every x.
    let a = random_spd(6, 10);
    let m = random_spd(6, 11);
    let roots = generalized_eig(&a, &m).unwrap().values;
    let det_m = lu_determinant(&m.to_dense()).unwrap();
    for x in [-1.0, 0.0, 0.37, 2.5, 10.0] {
        let pencil = Matrix::from_fn(6, 6, |i, j| x * m.get(i, j) - a.get(i, j));
        let lhs = lu_determinant(&pencil).unwrap() / det_m;
        let rhs: f64 = roots.iter().map(|r| x - r).product();
        assert!((lhs - rhs).abs() < 1e-9 * (1.0 + rhs.abs()), "x = {x}: {lhs} vs {rhs}");
    }
}

proptest! {
    #[test]
    fn trace_and_cholesky_invariants(order in 1usize..12, seed in 0u64..1000) {
        let a = random_spd(order, seed);
        let spec = sym_eig(&a, false).unwrap();
        let sum: f64 = spec.values.iter().sum();
        prop_assert!((sum - a.trace()).abs() < 1e-10 * a.frobenius());
        prop_assert!(spec.values.windows(2).all(|w| w[0] >= w[1]));
        let l = cholesky(&a).unwrap();
        let back = l.matmul(&l.transpose()).unwrap();
        for i in 0..order {
            for j in 0..=i {
                prop_assert!((back.get(i, j) - a.get(i, j)).abs() < 1e-10 * a.frobenius());
            }
        }
    }
}
