//! Dense complex matrix kernels: Kronecker products, partial traces and
//! Hermitian spectral decompositions.
//!
//! Everything above this module (states, measurements, optimizers) is built
//! on `CMatrix`, a dense square matrix of `Complex64`. Dimensions stay small
//! (a few dozen at most), so the routines here favour clarity and numerical
//! robustness over asymptotic speed.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

/// Dense complex matrix; the substrate for all operators.
pub type CMatrix = DMatrix<Complex64>;

/// Dense complex column vector.
pub type CVector = DVector<Complex64>;

/// Max-entry tolerance for accepting a matrix as Hermitian.
pub const HERMITICITY_TOL: f64 = 1e-10;

/// Errors from the matrix kernels.
#[derive(Debug, Error)]
pub enum MatError {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not Hermitian: max |m - m^H| entry is {max_asymmetry:.3e}")]
    NotHermitian { max_asymmetry: f64 },
}

/// Which tensor factor a partial trace keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are sorted descending; column `i` of `eigenvectors` is the
/// unit eigenvector for `eigenvalues[i]`, so `U diag(lambda) U^H`
/// reconstructs the input.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl Spectrum {
    /// Smallest eigenvalue (the last one, since the list is descending).
    pub fn min_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().expect("spectrum of empty matrix")
    }

    /// `U diag(f(lambda)) U^H` for a scalar function `f` of the eigenvalues.
    pub fn map_eigenvalues(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.eigenvalues.len();
        let diag = DVector::from_iterator(
            n,
            self.eigenvalues.iter().map(|&l| Complex64::new(f(l), 0.0)),
        );
        &self.eigenvectors * CMatrix::from_diagonal(&diag) * self.eigenvectors.adjoint()
    }

    /// Reconstruct the original matrix as `U diag(lambda) U^H`.
    pub fn reconstruct(&self) -> CMatrix {
        self.map_eigenvalues(|l| l)
    }
}

/// Identity matrix of the given dimension.
pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

/// Rank-one outer product `v w^H`.
pub fn outer(v: &CVector, w: &CVector) -> CMatrix {
    v * w.adjoint()
}

/// Largest entrywise absolute difference between two same-shape matrices.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "max_abs_diff on mismatched shapes");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Max entry of `|m - m^H|`; zero for an exactly Hermitian matrix.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Kronecker product, `dim = dim(x) * dim(y)`; block `(i, j)` is `x[i,j] * y`.
pub fn tensor_product(x: &CMatrix, y: &CMatrix) -> CMatrix {
    x.kronecker(y)
}

/// Trace over one tensor factor of a `(d_a * d_b)`-dimensional operator.
///
/// Preserves the total trace exactly up to floating-point summation.
pub fn partial_trace(
    m: &CMatrix,
    d_a: usize,
    d_b: usize,
    keep: Subsystem,
) -> Result<CMatrix, MatError> {
    if m.nrows() != m.ncols() {
        return Err(MatError::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.nrows() != d_a * d_b {
        return Err(MatError::DimensionMismatch {
            expected: d_a * d_b,
            actual: m.nrows(),
        });
    }
    let out = match keep {
        Subsystem::A => CMatrix::from_fn(d_a, d_a, |i, j| {
            (0..d_b).map(|k| m[(i * d_b + k, j * d_b + k)]).sum()
        }),
        Subsystem::B => CMatrix::from_fn(d_b, d_b, |k, l| {
            (0..d_a).map(|i| m[(i * d_b + k, i * d_b + l)]).sum()
        }),
    };
    Ok(out)
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues descending.
///
/// Inputs within [`HERMITICITY_TOL`] of Hermitian are symmetrized as
/// `(m + m^H) / 2` before decomposition; anything further off is rejected.
pub fn hermitian_spectrum(m: &CMatrix) -> Result<Spectrum, MatError> {
    if m.nrows() != m.ncols() {
        return Err(MatError::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    let defect = hermiticity_defect(m);
    if defect > HERMITICITY_TOL {
        return Err(MatError::NotHermitian {
            max_asymmetry: defect,
        });
    }
    let h = (m + m.adjoint()).scale(0.5);
    let eig = nalgebra::SymmetricEigen::new(h);

    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[j]
            .partial_cmp(&eig.eigenvalues[i])
            .expect("eigenvalues of a Hermitian matrix are finite")
    });

    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut eigenvectors = CMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        eigenvectors.set_column(col, &eig.eigenvectors.column(src));
    }
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// Principal square root of a positive semidefinite Hermitian matrix.
///
/// Eigenvalues in `[-HERMITICITY_TOL, 0)` are clamped to zero first.
pub fn psd_sqrt(m: &CMatrix) -> Result<CMatrix, MatError> {
    let spec = hermitian_spectrum(m)?;
    Ok(spec.map_eigenvalues(|l| l.max(0.0).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    pub(crate) fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_complex(dim: usize, seed: u64) -> CMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        CMatrix::from_fn(dim, dim, |_, _| {
            c(rng.sample(StandardNormal), rng.sample(StandardNormal))
        })
    }

    fn random_hermitian(dim: usize, seed: u64) -> CMatrix {
        let g = random_complex(dim, seed);
        (&g + g.adjoint()).scale(0.5)
    }

    fn pauli_x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
    }

    /// Index-formula oracle: kron(x, y)[i*dy + k, j*dy + l] = x[i,j] * y[k,l].
    fn kron_oracle(x: &CMatrix, y: &CMatrix) -> CMatrix {
        let (dx, dy) = (x.nrows(), y.nrows());
        CMatrix::from_fn(dx * dy, dx * dy, |r, s| {
            x[(r / dy, s / dy)] * y[(r % dy, s % dy)]
        })
    }

    /// Index-sum oracle for tracing out B: out[i,j] = sum_k m[i*db+k, j*db+k].
    fn ptrace_b_oracle(m: &CMatrix, da: usize, db: usize) -> CMatrix {
        CMatrix::from_fn(da, da, |i, j| {
            (0..db).map(|k| m[(i * db + k, j * db + k)]).sum()
        })
    }

    #[test]
    fn tensor_product_of_identities_is_identity() {
        let k = tensor_product(&identity(2), &identity(2));
        assert_eq!(max_abs_diff(&k, &identity(4)), 0.0);
    }

    #[test]
    fn tensor_product_of_projectors() {
        let p = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]));
        let k = tensor_product(&p, &p);
        let expected = CMatrix::from_fn(4, 4, |i, j| {
            if i == 0 && j == 0 {
                c(1.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        assert_eq!(max_abs_diff(&k, &expected), 0.0);
    }

    #[test]
    fn tensor_product_matches_index_oracle() {
        for seed in 0..5u64 {
            let x = random_complex(2, seed);
            let y = random_complex(3, seed + 100);
            let k = tensor_product(&x, &y);
            assert!(max_abs_diff(&k, &kron_oracle(&x, &y)) == 0.0);
        }
    }

    #[test]
    fn tensor_product_pauli_x_action_on_basis() {
        // (X (x) X) e0 (x) e0 = e1 (x) e1, checked through the matrix entries.
        let xx = tensor_product(&pauli_x(), &pauli_x());
        assert!(max_abs_diff(&xx, &kron_oracle(&pauli_x(), &pauli_x())) == 0.0);
        let e00 = CVector::from_fn(4, |i, _| if i == 0 { c(1.0, 0.0) } else { c(0.0, 0.0) });
        let mapped = &xx * e00;
        let e11 = CVector::from_fn(4, |i, _| if i == 3 { c(1.0, 0.0) } else { c(0.0, 0.0) });
        assert!((mapped - e11).norm() < 1e-15);
    }

    #[test]
    fn partial_trace_factorizes_product_operators() {
        let a = random_hermitian(2, 3);
        // Unit-trace PSD factor on B.
        let g = random_complex(3, 5);
        let b_psd = &g * g.adjoint();
        let b = b_psd.scale(1.0 / b_psd.trace().re);
        let joint = tensor_product(&a, &b);
        let kept = partial_trace(&joint, 2, 3, Subsystem::A).unwrap();
        assert!(max_abs_diff(&kept, &a) < 1e-12);
    }

    #[test]
    fn partial_trace_of_bell_projector_is_maximally_mixed() {
        let mut bell = CVector::zeros(4);
        bell[0] = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        bell[3] = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let rho = outer(&bell, &bell);
        let red = partial_trace(&rho, 2, 2, Subsystem::A).unwrap();
        assert!(max_abs_diff(&red, &identity(2).scale(0.5)) < 1e-15);
    }

    #[test]
    fn partial_trace_matches_index_sum_oracle() {
        let m = random_hermitian(4, 11);
        let red = partial_trace(&m, 2, 2, Subsystem::A).unwrap();
        assert!(max_abs_diff(&red, &ptrace_b_oracle(&m, 2, 2)) == 0.0);
    }

    #[test]
    fn partial_trace_rejects_bad_dimensions() {
        let m = random_hermitian(4, 1);
        let err = partial_trace(&m, 2, 3, Subsystem::A).unwrap_err();
        match err {
            MatError::DimensionMismatch { expected, actual } => {
                assert_eq!(expected, 6);
                assert_eq!(actual, 4);
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn spectrum_of_half_half_diagonal() {
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![c(0.5, 0.0), c(0.5, 0.0)]));
        let spec = hermitian_spectrum(&m).unwrap();
        assert_eq!(spec.eigenvalues, vec![0.5, 0.5]);
    }

    #[test]
    fn spectrum_of_pauli_x() {
        let spec = hermitian_spectrum(&pauli_x()).unwrap();
        assert!((spec.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((spec.eigenvalues[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn spectrum_reconstructs_random_hermitian() {
        let m = random_hermitian(6, 21);
        let spec = hermitian_spectrum(&m).unwrap();
        let rel = (spec.reconstruct() - &m).norm() / m.norm();
        assert!(rel < 1e-10, "relative reconstruction error {rel:e}");
        let u = &spec.eigenvectors;
        let unit_defect = (u.adjoint() * u - identity(6)).norm();
        assert!(unit_defect < 1e-10, "unitarity defect {unit_defect:e}");
    }

    #[test]
    fn spectrum_rejects_non_hermitian_and_reports_asymmetry() {
        let mut m = random_hermitian(3, 30);
        m[(0, 1)] += c(1e-3, 0.0);
        let err = hermitian_spectrum(&m).unwrap_err();
        match err {
            MatError::NotHermitian { max_asymmetry } => {
                assert!((max_asymmetry - 1e-3).abs() < 1e-6);
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    proptest! {
        #[test]
        fn kronecker_is_associative(seed in any::<u64>()) {
            let a = random_complex(2, seed);
            let b = random_complex(2, seed ^ 0xa5a5);
            let c_m = random_complex(2, seed ^ 0x5a5a);
            let left = tensor_product(&tensor_product(&a, &b), &c_m);
            let right = tensor_product(&a, &tensor_product(&b, &c_m));
            prop_assert!(max_abs_diff(&left, &right) < 1e-12);
        }

        #[test]
        fn trace_is_multiplicative_over_tensor_products(seed in any::<u64>()) {
            let a = random_complex(3, seed);
            let b = random_complex(2, seed ^ 0x1234);
            let lhs = tensor_product(&a, &b).trace();
            let rhs = a.trace() * b.trace();
            prop_assert!((lhs - rhs).norm() < 1e-12);
        }

        #[test]
        fn partial_trace_is_linear_and_trace_preserving(seed in any::<u64>()) {
            let m = random_complex(6, seed);
            let n = random_complex(6, seed ^ 0x77);
            let sum = &m + &n;
            let pt_sum = partial_trace(&sum, 2, 3, Subsystem::B).unwrap();
            let pt_m = partial_trace(&m, 2, 3, Subsystem::B).unwrap();
            let pt_n = partial_trace(&n, 2, 3, Subsystem::B).unwrap();
            prop_assert!(max_abs_diff(&pt_sum, &(&pt_m + &pt_n)) < 1e-12);
            prop_assert!((pt_m.trace() - m.trace()).norm() < 1e-12);
        }

        #[test]
        fn psd_spectra_are_nonnegative(seed in any::<u64>()) {
            let g = random_complex(4, seed);
            let psd = &g * g.adjoint();
            let spec = hermitian_spectrum(&psd).unwrap();
            prop_assert!(spec.min_eigenvalue() >= -1e-10);
        }
    }
}
