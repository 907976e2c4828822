//! POVM measurements and the statistics they induce: outcome distributions,
//! conditional states, measurement-conditioned entropy, classical mutual
//! information of outcomes, and the block Naimark dilation.

use crate::matkernel::{
    hermitian_spectrum, hermiticity_defect, identity, max_abs_diff, outer, psd_sqrt, CMatrix,
    CVector, MatError,
};
use crate::qstate::{entropy_bits, DensityMatrix, StateError, SUPPORT_CUTOFF};
use num_complex::Complex64;
use thiserror::Error;

/// Max-entry tolerance for the resolution-of-identity check.
pub const RESOLUTION_TOL: f64 = 1e-9;

/// Errors from measurement construction and statistics.
#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("a POVM needs at least one element")]
    Empty,

    #[error("POVM element {index} is {rows}x{cols}, expected {dim}x{dim}")]
    ElementShape {
        index: usize,
        rows: usize,
        cols: usize,
        dim: usize,
    },

    #[error("POVM element {index} is not Hermitian: defect {defect:.3e}")]
    ElementNotHermitian { index: usize, defect: f64 },

    #[error("POVM element {index} is not PSD: min eigenvalue {min_eigenvalue:.3e}")]
    ElementNotPsd { index: usize, min_eigenvalue: f64 },

    #[error("elements do not sum to the identity: max deviation {deviation:.3e}")]
    NotResolutionOfIdentity { deviation: f64 },

    #[error("dimension mismatch: state dim {state_dim}, POVM dim {povm_dim}")]
    DimensionMismatch { state_dim: usize, povm_dim: usize },

    #[error("a rank-1 POVM on dimension {dim} needs at least {dim} outcomes, got {n_outcomes}")]
    NotEnoughOutcomes { n_outcomes: usize, dim: usize },

    #[error("state has no bipartite split")]
    MissingSplit,

    #[error("outcome probability {prob:.3e} is negative beyond tolerance")]
    NegativeProbability { prob: f64 },

    #[error("probabilities sum to {sum:.12}, expected 1 within {tol:.1e}")]
    NotNormalized { sum: f64, tol: f64 },

    #[error(transparent)]
    State(#[from] StateError),

    #[error(transparent)]
    Mat(#[from] MatError),
}

/// A finite positive operator-valued measure: Hermitian PSD elements that
/// form a resolution of the identity.
#[derive(Debug, Clone)]
pub struct Povm {
    dim: usize,
    elements: Vec<CMatrix>,
}

impl Povm {
    pub fn new(elements: Vec<CMatrix>) -> Result<Self, MeasureError> {
        let first = elements.first().ok_or(MeasureError::Empty)?;
        let dim = first.nrows();
        for (index, m) in elements.iter().enumerate() {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(MeasureError::ElementShape {
                    index,
                    rows: m.nrows(),
                    cols: m.ncols(),
                    dim,
                });
            }
            let defect = hermiticity_defect(m);
            if defect > 1e-10 {
                return Err(MeasureError::ElementNotHermitian { index, defect });
            }
            let spec = hermitian_spectrum(m)?;
            let min = spec.min_eigenvalue();
            if min < -1e-10 {
                return Err(MeasureError::ElementNotPsd {
                    index,
                    min_eigenvalue: min,
                });
            }
        }
        let mut sum = CMatrix::zeros(dim, dim);
        for m in &elements {
            sum += m;
        }
        let deviation = max_abs_diff(&sum, &identity(dim));
        if deviation > RESOLUTION_TOL {
            return Err(MeasureError::NotResolutionOfIdentity { deviation });
        }
        Ok(Self { dim, elements })
    }

    /// The uninformative single-outcome measurement `{I}`.
    pub fn trivial(dim: usize) -> Self {
        Self {
            dim,
            elements: vec![identity(dim)],
        }
    }

    /// Projectors onto the computational basis.
    pub fn computational(dim: usize) -> Self {
        let elements = (0..dim)
            .map(|k| {
                CMatrix::from_fn(dim, dim, |i, j| {
                    if i == k && j == k {
                        Complex64::new(1.0, 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
            })
            .collect();
        Self { dim, elements }
    }

    /// Rank-one projectors onto the columns of a unitary; the columns must be
    /// orthonormal for the result to resolve the identity.
    pub fn from_basis_columns(u: &CMatrix) -> Result<Self, MeasureError> {
        let elements: Vec<CMatrix> = (0..u.ncols())
            .map(|k| {
                let col = u.column(k).into_owned();
                outer(&col, &col)
            })
            .collect();
        Self::new(elements)
    }

    /// Skip validation for elements that are valid by construction (the
    /// decoder's normalization guarantees the invariants).
    pub(crate) fn from_parts_unchecked(dim: usize, elements: Vec<CMatrix>) -> Self {
        debug_assert!(!elements.is_empty());
        Self { dim, elements }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    /// True when every element is a rank-one orthogonal projector, i.e. the
    /// POVM is a von Neumann measurement of a complete basis.
    pub fn is_rank1_projective(&self, tol: f64) -> bool {
        self.elements.len() == self.dim
            && self.elements.iter().all(|m| {
                let idempotency = max_abs_diff(&(m * m), m);
                idempotency <= tol && (m.trace().re - 1.0).abs() <= tol
            })
    }
}

/// Seeded random POVM with rank-one elements: `M_k = S^{-1/2} |phi_k><phi_k|
/// S^{-1/2}` for Gaussian vectors `phi_k` and `S` their outer-product sum.
///
/// Rank-one elements are the measurements that dilate to complete sets of
/// one-dimensional projectors; the entropy inequalities between a state and
/// its outcome statistics hold for exactly this class. Needs
/// `n_outcomes >= dim` so that `S` is invertible.
pub fn random_rank1_povm(dim: usize, n_outcomes: usize, seed: u64) -> Result<Povm, MeasureError> {
    use rand::Rng;
    use rand::SeedableRng;
    if n_outcomes < dim {
        return Err(MeasureError::NotEnoughOutcomes { n_outcomes, dim });
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let vectors: Vec<CVector> = (0..n_outcomes)
        .map(|_| {
            CVector::from_fn(dim, |_, _| {
                Complex64::new(
                    rng.sample(rand_distr::StandardNormal),
                    rng.sample(rand_distr::StandardNormal),
                )
            })
        })
        .collect();
    let mut s = CMatrix::zeros(dim, dim);
    for v in &vectors {
        s += outer(v, v);
    }
    let spec = hermitian_spectrum(&s)?;
    let s_inv_sqrt = spec.map_eigenvalues(|l| 1.0 / l.sqrt());
    let elements: Vec<CMatrix> = vectors
        .iter()
        .map(|v| {
            let w = &s_inv_sqrt * v;
            outer(&w, &w)
        })
        .collect();
    Povm::new(elements)
}

/// The symmetric three-outcome qubit POVM `{(2/3)|phi_k><phi_k|}` with the
/// `|phi_k>` at angles `2 pi k / 3` in the real plane.
pub fn trine_qubit() -> Povm {
    let elements = (0..3)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * k as f64 / 3.0;
            let v = CVector::from_vec(vec![
                Complex64::new(angle.cos(), 0.0),
                Complex64::new(angle.sin(), 0.0),
            ]);
            outer(&v, &v).scale(2.0 / 3.0)
        })
        .collect();
    Povm::new(elements).expect("trine is a valid POVM")
}

/// Probability vector over measurement outcomes.
#[derive(Debug, Clone)]
pub struct OutcomeDistribution {
    probs: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self, MeasureError> {
        let clamped = clamp_probs(probs)?;
        let sum: f64 = clamped.iter().sum();
        if (sum - 1.0).abs() > RESOLUTION_TOL {
            return Err(MeasureError::NotNormalized {
                sum,
                tol: RESOLUTION_TOL,
            });
        }
        Ok(Self { probs: clamped })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// Joint probability table over outcome pairs `(a, b)`, stored row-major in `a`.
#[derive(Debug, Clone)]
pub struct JointOutcomeTable {
    probs: Vec<f64>,
    n_a: usize,
    n_b: usize,
}

impl JointOutcomeTable {
    pub fn new(probs: Vec<f64>, n_a: usize, n_b: usize) -> Result<Self, MeasureError> {
        assert_eq!(probs.len(), n_a * n_b, "table shape mismatch");
        let clamped = clamp_probs(probs)?;
        let sum: f64 = clamped.iter().sum();
        if (sum - 1.0).abs() > RESOLUTION_TOL {
            return Err(MeasureError::NotNormalized {
                sum,
                tol: RESOLUTION_TOL,
            });
        }
        Ok(Self {
            probs: clamped,
            n_a,
            n_b,
        })
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.probs[a * self.n_b + b]
    }

    pub fn n_a(&self) -> usize {
        self.n_a
    }

    pub fn n_b(&self) -> usize {
        self.n_b
    }

    /// The flat table, row-major in the first index.
    pub fn flat(&self) -> &[f64] {
        &self.probs
    }

    pub fn marginal_a(&self) -> Vec<f64> {
        (0..self.n_a)
            .map(|a| (0..self.n_b).map(|b| self.get(a, b)).sum())
            .collect()
    }

    pub fn marginal_b(&self) -> Vec<f64> {
        (0..self.n_b)
            .map(|b| (0..self.n_a).map(|a| self.get(a, b)).sum())
            .collect()
    }
}

fn clamp_probs(mut probs: Vec<f64>) -> Result<Vec<f64>, MeasureError> {
    for p in &mut probs {
        if *p < 0.0 {
            if *p < -1e-10 {
                return Err(MeasureError::NegativeProbability { prob: *p });
            }
            *p = 0.0;
        }
    }
    Ok(probs)
}

/// `Pr{alpha = a} = Tr(rho M_a)` for each element of the POVM.
pub fn outcome_distribution(
    rho: &DensityMatrix,
    povm: &Povm,
) -> Result<OutcomeDistribution, MeasureError> {
    if rho.dim() != povm.dim() {
        return Err(MeasureError::DimensionMismatch {
            state_dim: rho.dim(),
            povm_dim: povm.dim(),
        });
    }
    let probs = povm
        .elements()
        .iter()
        .map(|m| (rho.matrix() * m).trace().re)
        .collect();
    OutcomeDistribution::new(probs)
}

/// `Tr_B{rho(A,B) [I(A) (x) M_b]}`: the unnormalized conditional operator on
/// A whose trace is the outcome probability.
pub(crate) fn reduced_after_b(
    rho_ab: &DensityMatrix,
    m_b: &CMatrix,
) -> Result<CMatrix, MeasureError> {
    let (d_a, d_b) = rho_ab.split().ok_or(MeasureError::MissingSplit)?;
    if m_b.nrows() != d_b || m_b.ncols() != d_b {
        return Err(MeasureError::DimensionMismatch {
            state_dim: d_b,
            povm_dim: m_b.nrows(),
        });
    }
    let rho = rho_ab.matrix();
    Ok(CMatrix::from_fn(d_a, d_a, |i, j| {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..d_b {
            for kp in 0..d_b {
                acc += rho[(i * d_b + k, j * d_b + kp)] * m_b[(kp, k)];
            }
        }
        acc
    }))
}

/// Joint outcome table `Pr{alpha = a, beta = b} = Tr{rho [M_a (x) M_b]}`.
pub fn joint_distribution(
    rho_ab: &DensityMatrix,
    povm_a: &Povm,
    povm_b: &Povm,
) -> Result<JointOutcomeTable, MeasureError> {
    let (d_a, d_b) = rho_ab.split().ok_or(MeasureError::MissingSplit)?;
    if povm_a.dim() != d_a {
        return Err(MeasureError::DimensionMismatch {
            state_dim: d_a,
            povm_dim: povm_a.dim(),
        });
    }
    if povm_b.dim() != d_b {
        return Err(MeasureError::DimensionMismatch {
            state_dim: d_b,
            povm_dim: povm_b.dim(),
        });
    }
    let (n_a, n_b) = (povm_a.len(), povm_b.len());
    let mut probs = vec![0.0; n_a * n_b];
    for (b, m_b) in povm_b.elements().iter().enumerate() {
        let t_b = reduced_after_b(rho_ab, m_b)?;
        for (a, m_a) in povm_a.elements().iter().enumerate() {
            probs[a * n_b + b] = (&t_b * m_a).trace().re;
        }
    }
    JointOutcomeTable::new(probs, n_a, n_b)
}

/// Conditional state of A given outcome `b` on B, together with the outcome
/// probability. Outcomes with probability at or below the support cutoff are
/// reported as `None` and must be skipped by the caller.
pub fn conditional_state(
    rho_ab: &DensityMatrix,
    element_b: &CMatrix,
) -> Result<Option<(DensityMatrix, f64)>, MeasureError> {
    let t = reduced_after_b(rho_ab, element_b)?;
    let p = t.trace().re;
    if p <= SUPPORT_CUTOFF {
        return Ok(None);
    }
    let state = DensityMatrix::new(t.scale(1.0 / p), None)?;
    Ok(Some((state, p)))
}

/// Measurement-conditioned entropy in bits:
/// `H(A|beta) = sum_b Pr{beta = b} H(rho(A | beta = b))`.
///
/// Zero-probability outcomes contribute nothing.
pub fn conditional_entropy_given(
    rho_ab: &DensityMatrix,
    povm_b: &Povm,
) -> Result<f64, MeasureError> {
    let (_, d_b) = rho_ab.split().ok_or(MeasureError::MissingSplit)?;
    if povm_b.dim() != d_b {
        return Err(MeasureError::DimensionMismatch {
            state_dim: d_b,
            povm_dim: povm_b.dim(),
        });
    }
    let mut total = 0.0;
    for m_b in povm_b.elements() {
        let t = reduced_after_b(rho_ab, m_b)?;
        let p = t.trace().re;
        if p <= SUPPORT_CUTOFF {
            continue;
        }
        // Eigenvalues of the normalized conditional state; no need for the
        // full decomposition here.
        let h = (&t + t.adjoint()).scale(0.5 / p);
        let eigs = h.symmetric_eigenvalues();
        total += p * entropy_bits(eigs.iter().copied());
    }
    Ok(total)
}

/// Shannon entropy in bits of a probability vector, `0 log 0 = 0`.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    entropy_bits(probs.iter().copied())
}

/// `I(alpha; beta) = H(alpha) + H(beta) - H(alpha, beta)` from a joint table.
pub fn classical_mutual_information(t: &JointOutcomeTable) -> f64 {
    shannon_entropy(&t.marginal_a()) + shannon_entropy(&t.marginal_b()) - shannon_entropy(t.flat())
}

/// A POVM realized as a von Neumann measurement in an extended space.
///
/// `isometry` is the `(K * dim) x dim` block column stack of the element
/// square roots; `projective` holds the `K` block projectors. For every state
/// `Tr(rho M_k) = Tr(V rho V^H P_k)`.
#[derive(Debug, Clone)]
pub struct NaimarkDilation {
    pub isometry: CMatrix,
    pub projective: Povm,
}

impl NaimarkDilation {
    /// Dimension of the extended space, `K * dim`.
    pub fn extended_dim(&self) -> usize {
        self.isometry.nrows()
    }
}

/// Constructive Naimark dilation of a finite POVM: `V = stack_k sqrt(M_k)`
/// with block projectors `P_k` on the `K * dim` extended space.
pub fn naimark_dilate(povm: &Povm) -> NaimarkDilation {
    let d = povm.dim();
    let k = povm.len();
    let mut isometry = CMatrix::zeros(k * d, d);
    for (block, m) in povm.elements().iter().enumerate() {
        let root = psd_sqrt(m).expect("POVM elements are Hermitian PSD");
        isometry.view_mut((block * d, 0), (d, d)).copy_from(&root);
    }
    let projective_elements: Vec<CMatrix> = (0..k)
        .map(|block| {
            let mut p = CMatrix::zeros(k * d, k * d);
            p.view_mut((block * d, block * d), (d, d))
                .copy_from(&identity(d));
            p
        })
        .collect();
    let projective =
        Povm::new(projective_elements).expect("block projectors resolve the identity");
    NaimarkDilation {
        isometry,
        projective,
    }
}
