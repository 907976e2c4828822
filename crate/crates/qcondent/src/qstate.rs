//! Density matrices and the entropic quantities defined on them: von Neumann
//! entropy, relative entropy, entropy defect, dephasing and seeded random
//! state generation.
//!
//! All entropies are reported in bits (base-2 logarithms) with the usual
//! `0 log 0 = 0` convention. Eigenvalues below [`SUPPORT_CUTOFF`] are treated
//! as zero throughout.

use crate::matkernel::{
    self, hermitian_spectrum, max_abs_diff, partial_trace, tensor_product, CMatrix, CVector,
    MatError, Subsystem,
};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

/// Eigenvalues at or below this are treated as zero probability mass.
pub const SUPPORT_CUTOFF: f64 = 1e-12;

/// Most negative eigenvalue tolerated before a matrix is rejected as not PSD.
pub const PSD_TOL: f64 = -1e-10;

/// Allowed deviation of the trace from one.
pub const TRACE_TOL: f64 = 1e-10;

const LOG2_E: f64 = std::f64::consts::LOG2_E;

/// Errors from state construction and the entropic operations.
#[derive(Debug, Error)]
pub enum StateError {
    #[error(transparent)]
    Mat(#[from] MatError),

    #[error("matrix is not positive semidefinite: min eigenvalue {min_eigenvalue:.3e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("trace is {trace:.12}, expected 1 within {tol:.1e}")]
    TraceNotOne { trace: f64, tol: f64 },

    #[error("bipartite split {d_a}x{d_b} does not match dimension {dim}")]
    BadSplit { d_a: usize, d_b: usize, dim: usize },

    #[error("operation requires a bipartite split, but none is set")]
    MissingSplit,

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("rank {rank} out of range 1..={dim}")]
    RankOutOfRange { rank: usize, dim: usize },

    #[error("basis is not orthonormal and complete: max Gram defect {defect:.3e}")]
    BasisNotOrthonormal { defect: f64 },

    #[error("weights must be nonnegative and sum to 1: {0}")]
    BadWeights(String),

    #[error("ensemble states must share a dimension")]
    MixedDimensions,
}

/// A validated quantum state: Hermitian, positive semidefinite, unit trace,
/// optionally tagged with a bipartite dimension split `(d_a, d_b)`.
///
/// The eigendecomposition is computed once at construction; eigenvalues in
/// `[-1e-10, 0)` are clamped to zero and the spectrum renormalized.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    mat: CMatrix,
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
    split: Option<(usize, usize)>,
}

impl DensityMatrix {
    pub fn new(mat: CMatrix, split: Option<(usize, usize)>) -> Result<Self, StateError> {
        let spec = hermitian_spectrum(&mat)?;
        let dim = spec.eigenvalues.len();
        if let Some((d_a, d_b)) = split {
            if d_a == 0 || d_b == 0 || d_a * d_b != dim {
                return Err(StateError::BadSplit { d_a, d_b, dim });
            }
        }
        let min = spec.min_eigenvalue();
        if min < PSD_TOL {
            return Err(StateError::NotPositive {
                min_eigenvalue: min,
            });
        }
        let trace = mat.trace().re;
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(StateError::TraceNotOne {
                trace,
                tol: TRACE_TOL,
            });
        }
        let mut eigenvalues: Vec<f64> = spec.eigenvalues.iter().map(|&l| l.max(0.0)).collect();
        let total: f64 = eigenvalues.iter().sum();
        for l in &mut eigenvalues {
            *l /= total;
        }
        let hermitized = (&mat + mat.adjoint()).scale(0.5);
        Ok(Self {
            mat: hermitized,
            eigenvalues,
            eigenvectors: spec.eigenvectors,
            split,
        })
    }

    /// Bipartite state on `d_a * d_b` dimensions.
    pub fn bipartite(mat: CMatrix, d_a: usize, d_b: usize) -> Result<Self, StateError> {
        Self::new(mat, Some((d_a, d_b)))
    }

    /// Rank-one state `|psi><psi| / <psi|psi>`.
    pub fn pure(ket: &CVector, split: Option<(usize, usize)>) -> Result<Self, StateError> {
        let norm2 = ket.norm_squared();
        let mat = matkernel::outer(ket, ket).scale(1.0 / norm2);
        Self::new(mat, split)
    }

    /// Attach a bipartite split to an existing state.
    pub fn with_split(self, d_a: usize, d_b: usize) -> Result<Self, StateError> {
        if d_a * d_b != self.dim() {
            return Err(StateError::BadSplit {
                d_a,
                d_b,
                dim: self.dim(),
            });
        }
        Ok(Self {
            split: Some((d_a, d_b)),
            ..self
        })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn split(&self) -> Option<(usize, usize)> {
        self.split
    }

    /// Clamped, renormalized eigenvalues in descending order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Unitary whose columns are the eigenvectors matching [`eigenvalues`](Self::eigenvalues).
    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigenvectors
    }
}

/// A probabilistic mixture of same-dimension states.
#[derive(Debug, Clone)]
pub struct Ensemble {
    weights: Vec<f64>,
    states: Vec<DensityMatrix>,
}

impl Ensemble {
    pub fn new(weights: Vec<f64>, states: Vec<DensityMatrix>) -> Result<Self, StateError> {
        if weights.is_empty() || weights.len() != states.len() {
            return Err(StateError::BadWeights(format!(
                "{} weights for {} states",
                weights.len(),
                states.len()
            )));
        }
        if let Some(&w) = weights.iter().find(|&&w| w < 0.0) {
            return Err(StateError::BadWeights(format!("negative weight {w}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > TRACE_TOL {
            return Err(StateError::BadWeights(format!("weights sum to {total}")));
        }
        let dim = states[0].dim();
        if states.iter().any(|s| s.dim() != dim) {
            return Err(StateError::MixedDimensions);
        }
        Ok(Self { weights, states })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    /// The average state `sum_i w_i rho_i`.
    pub fn average(&self) -> DensityMatrix {
        let dim = self.states[0].dim();
        let mut acc = CMatrix::zeros(dim, dim);
        for (w, s) in self.weights.iter().zip(&self.states) {
            acc += s.matrix().scale(*w);
        }
        DensityMatrix::new(acc, self.states[0].split())
            .expect("mixture of valid states is a valid state")
    }
}

/// Shannon entropy in bits of a slice of nonnegative reals, `0 log 0 = 0`.
pub(crate) fn entropy_bits(probs: impl IntoIterator<Item = f64>) -> f64 {
    probs
        .into_iter()
        .filter(|&p| p > SUPPORT_CUTOFF)
        .map(|p| -p * p.log2())
        .sum()
}

/// Von Neumann entropy in bits: `-sum_i lambda_i log2 lambda_i`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_bits(rho.eigenvalues().iter().copied())
}

/// Reduced states `(rho_A, rho_B)` of a bipartite state.
pub fn marginals(rho_ab: &DensityMatrix) -> Result<(DensityMatrix, DensityMatrix), StateError> {
    let (d_a, d_b) = rho_ab.split().ok_or(StateError::MissingSplit)?;
    let a = partial_trace(rho_ab.matrix(), d_a, d_b, Subsystem::A)?;
    let b = partial_trace(rho_ab.matrix(), d_a, d_b, Subsystem::B)?;
    Ok((DensityMatrix::new(a, None)?, DensityMatrix::new(b, None)?))
}

/// Quantum relative entropy `Tr rho log2 rho - Tr rho log2 sigma`, in bits.
///
/// Returns `+inf` when the support of `rho` is not contained in the support
/// of `sigma`; errors only on a dimension mismatch.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64, StateError> {
    if rho.dim() != sigma.dim() {
        return Err(StateError::DimensionMismatch {
            left: rho.dim(),
            right: sigma.dim(),
        });
    }
    let lam = rho.eigenvalues();
    let mu = sigma.eigenvalues();
    // overlaps[(i, j)] = |<u_i|v_j>|^2
    let overlap = rho.eigenvectors().adjoint() * sigma.eigenvectors();

    let mut acc: f64 = lam
        .iter()
        .filter(|&&l| l > SUPPORT_CUTOFF)
        .map(|&l| l * l.log2())
        .sum();
    for (i, &l) in lam.iter().enumerate() {
        if l <= SUPPORT_CUTOFF {
            continue;
        }
        for (j, &m) in mu.iter().enumerate() {
            let p = overlap[(i, j)].norm_sqr();
            if m <= SUPPORT_CUTOFF {
                if l * p > SUPPORT_CUTOFF {
                    return Ok(f64::INFINITY);
                }
            } else {
                acc -= l * p * m.log2();
            }
        }
    }
    Ok(acc)
}

/// Entropy defect (Holevo quantity) of an ensemble, in bits:
/// `H(average) - sum_i w_i H(rho_i)`. Nonnegative by concavity.
pub fn entropy_defect(ens: &Ensemble) -> f64 {
    let mixed = von_neumann_entropy(&ens.average());
    let avg_entropy: f64 = ens
        .weights()
        .iter()
        .zip(ens.states())
        .map(|(w, s)| w * von_neumann_entropy(s))
        .sum();
    mixed - avg_entropy
}

/// Delete all off-diagonal elements of `rho` in the given orthonormal basis:
/// `rho' = sum_k |e_k><e_k| rho |e_k><e_k|`.
///
/// The basis must be complete and orthonormal within 1e-10.
pub fn dephase(rho: &DensityMatrix, basis: &[CVector]) -> Result<DensityMatrix, StateError> {
    let dim = rho.dim();
    if basis.len() != dim || basis.iter().any(|v| v.len() != dim) {
        return Err(StateError::BasisNotOrthonormal { defect: f64::NAN });
    }
    let mut b = CMatrix::zeros(dim, dim);
    for (k, v) in basis.iter().enumerate() {
        b.set_column(k, v);
    }
    let gram_defect = max_abs_diff(&(b.adjoint() * &b), &matkernel::identity(dim));
    if gram_defect > 1e-10 {
        return Err(StateError::BasisNotOrthonormal {
            defect: gram_defect,
        });
    }
    let rotated = b.adjoint() * rho.matrix() * &b;
    let diag = CMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            Complex64::new(rotated[(i, i)].re, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    DensityMatrix::new(&b * diag * b.adjoint(), rho.split())
}

/// Seeded random density matrix of the given rank: `G G^H / Tr(G G^H)` with
/// `G` a `dim x rank` matrix of standard complex Gaussians.
pub fn random_density(dim: usize, rank: usize, seed: u64) -> Result<DensityMatrix, StateError> {
    if rank == 0 || rank > dim {
        return Err(StateError::RankOutOfRange { rank, dim });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = CMatrix::from_fn(dim, rank, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let gg = &g * g.adjoint();
    let trace = gg.trace().re;
    DensityMatrix::new(gg.scale(1.0 / trace), None)
}

/// Seeded random full-rank bipartite state with split `(d_a, d_b)`.
pub fn random_bipartite(
    d_a: usize,
    d_b: usize,
    rank: usize,
    seed: u64,
) -> Result<DensityMatrix, StateError> {
    random_density(d_a * d_b, rank, seed)?.with_split(d_a, d_b)
}

/// The maximally entangled two-qubit state `(|00> + |11>) / sqrt(2)`.
pub fn bell_state() -> DensityMatrix {
    let mut ket = CVector::zeros(4);
    ket[0] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    ket[3] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    DensityMatrix::pure(&ket, Some((2, 2))).expect("Bell state is valid")
}

/// Maximally mixed state `I / dim`.
pub fn maximally_mixed(dim: usize) -> DensityMatrix {
    DensityMatrix::new(matkernel::identity(dim).scale(1.0 / dim as f64), None)
        .expect("maximally mixed state is valid")
}

/// Embed a classical joint distribution `p(a, b)` (flat, row-major in `a`)
/// as a state diagonal in the computational product basis.
pub fn classical_state(probs: &[f64], d_a: usize, d_b: usize) -> Result<DensityMatrix, StateError> {
    if probs.len() != d_a * d_b {
        return Err(StateError::DimensionMismatch {
            left: probs.len(),
            right: d_a * d_b,
        });
    }
    let diag = CVector::from_iterator(probs.len(), probs.iter().map(|&p| Complex64::new(p, 0.0)));
    DensityMatrix::bipartite(CMatrix::from_diagonal(&diag), d_a, d_b)
}

/// Product state `rho_a (x) rho_b` with the corresponding split.
pub fn product_state(
    rho_a: &DensityMatrix,
    rho_b: &DensityMatrix,
) -> Result<DensityMatrix, StateError> {
    DensityMatrix::bipartite(
        tensor_product(rho_a.matrix(), rho_b.matrix()),
        rho_a.dim(),
        rho_b.dim(),
    )
}

/// Convert bits to nats.
pub fn bits_to_nats(bits: f64) -> f64 {
    bits / LOG2_E
}
