//! Inequality and equality-condition checks over states and measurements,
//! plus the seeded sweep harness that runs them in bulk.
//!
//! Every check produces [`CheckReport`] records with a one-sided margin
//! convention: `margin = rhs - lhs`, and a check passes iff
//! `margin >= -tolerance`. Equality checks report `lhs = |x - y|`, `rhs = 0`.
//! Where a check consumes an optimizer output, the bound direction is chosen
//! so that under-optimization can never produce a false pass: conditional
//! entropy bounds sit on the large side of the infimum and mutual-information
//! bounds on the small side of the supremum.

use crate::exec;
use crate::matkernel::{hermitian_spectrum, max_abs_diff, CMatrix, CVector, MatError};
use crate::measure::{
    conditional_entropy_given, conditional_state, joint_distribution, outcome_distribution,
    random_rank1_povm, shannon_entropy, MeasureError, Povm,
};
use crate::optimize::{
    maximize_mutual_information_fixed_b_mode, minimize_conditional_entropy_mode, OptimizeError,
    OptimizerConfig,
};
use crate::qstate::{
    bell_state, classical_state, dephase, entropy_defect, marginals, maximally_mixed,
    product_state, random_bipartite, random_density, relative_entropy, von_neumann_entropy,
    DensityMatrix, Ensemble, StateError,
};
use thiserror::Error;

/// Errors from the verification harness.
#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("theorem-2 proof steps require a rank-1 projective measurement on B")]
    NotProjective,

    #[error("invalid sweep configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    State(#[from] StateError),

    #[error(transparent)]
    Measure(#[from] MeasureError),

    #[error(transparent)]
    Optimize(#[from] OptimizeError),

    #[error(transparent)]
    Mat(#[from] MatError),
}

/// One checked inequality (or equality) with its margin.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub check_name: String,
    pub state_descriptor: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`; nonnegative (within tolerance) when the check holds.
    pub margin: f64,
    pub passed: bool,
    pub tolerance: f64,
}

impl CheckReport {
    /// Check `lhs <= rhs` within `tol`.
    pub fn inequality(name: &str, descriptor: &str, lhs: f64, rhs: f64, tol: f64) -> Self {
        let margin = rhs - lhs;
        Self {
            check_name: name.to_string(),
            state_descriptor: descriptor.to_string(),
            lhs,
            rhs,
            margin,
            passed: margin >= -tol,
            tolerance: tol,
        }
    }

    /// Check `x == y` within `tol`, recorded as `|x - y| <= 0 + tol`.
    pub fn equality(name: &str, descriptor: &str, x: f64, y: f64, tol: f64) -> Self {
        Self::inequality(name, descriptor, (x - y).abs(), 0.0, tol)
    }

    /// Tab-separated machine-readable record.
    pub fn machine_line(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}",
            self.check_name,
            self.state_descriptor,
            fmt9(self.lhs),
            fmt9(self.rhs),
            fmt9(self.margin),
            if self.passed { "pass" } else { "fail" }
        )
    }
}

/// Fixed 9-decimal rendering used for all reported numbers; values that
/// round to zero print without a sign so equal quantities render identically.
pub fn fmt9(v: f64) -> String {
    let s = format!("{v:.9}");
    if s == "-0.000000000" {
        s[1..].to_string()
    } else {
        s
    }
}

/// Klein-lemma family: the three entropy inequalities between a state and
/// its outcome statistics.
///
/// These bounds cover measurements that dilate to complete sets of
/// one-dimensional projectors, i.e. POVMs with rank-one elements (projective
/// bases, [`random_rank1_povm`] outputs, the trine). Coarser elements merge
/// outcomes and can push the Shannon side below the von Neumann side.
pub fn check_lemma1(
    rho_ab: &DensityMatrix,
    povm_a: &Povm,
    povm_b: &Povm,
    descriptor: &str,
) -> Result<Vec<CheckReport>, VerifyError> {
    let tol = 1e-9;
    let (rho_a, rho_b) = marginals(rho_ab)?;
    let table = joint_distribution(rho_ab, povm_a, povm_b)?;
    let dist_a = outcome_distribution(&rho_a, povm_a)?;
    let dist_b = outcome_distribution(&rho_b, povm_b)?;
    Ok(vec![
        CheckReport::inequality(
            "lemma1_joint",
            descriptor,
            von_neumann_entropy(rho_ab),
            shannon_entropy(table.flat()),
            tol,
        ),
        CheckReport::inequality(
            "lemma1_a",
            descriptor,
            von_neumann_entropy(&rho_a),
            shannon_entropy(dist_a.probs()),
            tol,
        ),
        CheckReport::inequality(
            "lemma1_b",
            descriptor,
            von_neumann_entropy(&rho_b),
            shannon_entropy(dist_b.probs()),
            tol,
        ),
    ])
}

/// Conditioning can only decrease entropy: the optimized conditional-entropy
/// upper bound still sits below the marginal entropy.
pub fn check_theorem1(
    rho_ab: &DensityMatrix,
    cfg: &OptimizerConfig,
    descriptor: &str,
) -> Result<CheckReport, VerifyError> {
    check_theorem1_mode(rho_ab, cfg, descriptor, false)
}

fn check_theorem1_mode(
    rho_ab: &DensityMatrix,
    cfg: &OptimizerConfig,
    descriptor: &str,
    sequential: bool,
) -> Result<CheckReport, VerifyError> {
    let bound = minimize_conditional_entropy_mode(rho_ab, cfg, sequential)?;
    let (rho_a, _) = marginals(rho_ab)?;
    Ok(CheckReport::inequality(
        "theorem1",
        descriptor,
        bound.value,
        von_neumann_entropy(&rho_a),
        1e-6,
    ))
}

/// Per-measurement subadditivity: `H(A,B) <= H(B) + H(A|beta)` for any
/// measurement on B.
pub fn check_theorem2(
    rho_ab: &DensityMatrix,
    povm_b: &Povm,
    descriptor: &str,
) -> Result<CheckReport, VerifyError> {
    let (_, rho_b) = marginals(rho_ab)?;
    let rhs = von_neumann_entropy(&rho_b) + conditional_entropy_given(rho_ab, povm_b)?;
    Ok(CheckReport::inequality(
        "theorem2",
        descriptor,
        von_neumann_entropy(rho_ab),
        rhs,
        1e-9,
    ))
}

/// The three steps of the subadditivity proof for a rank-1 projective
/// measurement on B: the dephasing identity for `H(A|beta)`, monotonicity of
/// relative entropy under the partial trace, and the algebraic rearrangement
/// back to the theorem-2 inequality.
pub fn check_theorem2_proof_steps(
    rho_ab: &DensityMatrix,
    povm_b: &Povm,
    descriptor: &str,
) -> Result<Vec<CheckReport>, VerifyError> {
    if !povm_b.is_rank1_projective(1e-9) {
        return Err(VerifyError::NotProjective);
    }
    let (d_a, d_b) = rho_ab
        .split()
        .ok_or(MeasureError::MissingSplit)
        .map_err(VerifyError::from)?;
    if povm_b.dim() != d_b {
        return Err(MeasureError::DimensionMismatch {
            state_dim: d_b,
            povm_dim: povm_b.dim(),
        }
        .into());
    }

    // Basis u_{i,b} (x) v_b: conditional-state eigenvectors on A paired with
    // the measured basis vector on B.
    let mut basis: Vec<CVector> = Vec::with_capacity(d_a * d_b);
    for m_b in povm_b.elements() {
        let v_b = hermitian_spectrum(m_b)?.eigenvectors.column(0).into_owned();
        let u_cols: CMatrix = match conditional_state(rho_ab, m_b)? {
            Some((state, _)) => state.eigenvectors().clone(),
            // Zero-probability outcome: any orthonormal basis on A works.
            None => crate::matkernel::identity(d_a),
        };
        for i in 0..d_a {
            let u = u_cols.column(i);
            basis.push(CVector::from_fn(d_a * d_b, |idx, _| {
                u[idx / d_b] * v_b[idx % d_b]
            }));
        }
    }

    let rho_prime = dephase(rho_ab, &basis)?;
    let (_, rho_prime_b) = marginals(&rho_prime)?;
    let (_, rho_b) = marginals(rho_ab)?;

    let h_direct = conditional_entropy_given(rho_ab, povm_b)?;
    let two_term = von_neumann_entropy(&rho_prime) - von_neumann_entropy(&rho_prime_b);
    let joint_re = relative_entropy(rho_ab, &rho_prime)?;
    let reduced_re = relative_entropy(&rho_b, &rho_prime_b)?;
    let thm2_gap = von_neumann_entropy(&rho_b) + h_direct - von_neumann_entropy(rho_ab);

    Ok(vec![
        CheckReport::equality("thm2_proof_identity", descriptor, h_direct, two_term, 1e-9),
        CheckReport::inequality(
            "thm2_proof_monotonicity",
            descriptor,
            reduced_re,
            joint_re,
            1e-9,
        ),
        CheckReport::equality(
            "thm2_proof_rearrangement",
            descriptor,
            thm2_gap,
            joint_re - reduced_re,
            1e-9,
        ),
    ])
}

/// Entropy-defect bound for a fixed measurement on B: the best outcome
/// mutual information over measurements on A stays below
/// `H(A) - H(A|beta)`.
pub fn check_theorem3(
    rho_ab: &DensityMatrix,
    povm_b: &Povm,
    cfg: &OptimizerConfig,
    descriptor: &str,
) -> Result<CheckReport, VerifyError> {
    check_theorem3_mode(rho_ab, povm_b, cfg, descriptor, false)
}

fn check_theorem3_mode(
    rho_ab: &DensityMatrix,
    povm_b: &Povm,
    cfg: &OptimizerConfig,
    descriptor: &str,
    sequential: bool,
) -> Result<CheckReport, VerifyError> {
    let bound = maximize_mutual_information_fixed_b_mode(rho_ab, povm_b, cfg, sequential)?;
    let (rho_a, _) = marginals(rho_ab)?;
    let rhs = von_neumann_entropy(&rho_a) - conditional_entropy_given(rho_ab, povm_b)?;
    Ok(CheckReport::inequality(
        "theorem3",
        descriptor,
        bound.value,
        rhs,
        1e-6,
    ))
}

/// Sweep configuration: how many random states, at which dimensions, from
/// which seed, and how hard the embedded optimizer works.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub dims: Vec<(usize, usize)>,
    pub count: usize,
    pub seed: u64,
    /// Also run the fixed structured suite (Bell, product, classical,
    /// rank-deficient) with computational-basis measurements.
    pub structured: bool,
    pub optimizer: OptimizerConfig,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            dims: vec![(2, 2), (2, 3)],
            count: 200,
            seed: 42,
            structured: false,
            optimizer: OptimizerConfig {
                restarts: 4,
                max_evals: 600,
                ..OptimizerConfig::default()
            },
        }
    }
}

impl SweepConfig {
    fn validate(&self) -> Result<(), VerifyError> {
        if self.dims.is_empty() {
            return Err(VerifyError::InvalidConfig("dims must be nonempty".into()));
        }
        if self.dims.iter().any(|&(a, b)| a < 2 || b < 2) {
            return Err(VerifyError::InvalidConfig(
                "each subsystem dimension must be at least 2".into(),
            ));
        }
        self.optimizer.validate()?;
        Ok(())
    }
}

/// Aggregate counts of one sweep.
#[derive(Debug, Clone)]
pub struct SweepSummary {
    pub checks_run: usize,
    pub failures: usize,
    /// Largest observed `H(B) + H(A|beta) - H(A,B)`.
    pub max_theorem2_margin: f64,
    /// Largest observed `H(A) - H(A|beta) - I(alpha;beta)`.
    pub max_theorem3_margin: f64,
}

/// Reports plus summary from one sweep.
#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub summary: SweepSummary,
    pub reports: Vec<CheckReport>,
}

impl SweepOutcome {
    /// One machine-readable line per report.
    pub fn machine_report(&self) -> String {
        let mut out = String::new();
        for r in &self.reports {
            out.push_str(&r.machine_line());
            out.push('\n');
        }
        out
    }

    /// Human-readable per-check aggregation.
    pub fn summary_table(&self) -> String {
        use std::collections::BTreeMap;
        let mut rows: BTreeMap<&str, (usize, usize, f64)> = BTreeMap::new();
        for r in &self.reports {
            let row = rows
                .entry(r.check_name.as_str())
                .or_insert((0, 0, f64::INFINITY));
            row.0 += 1;
            if !r.passed {
                row.1 += 1;
            }
            row.2 = row.2.min(r.margin);
        }
        let mut out = String::new();
        out.push_str(&format!(
            "{:<28}{:>8}{:>10}{:>16}\n",
            "check", "runs", "failures", "min margin"
        ));
        for (name, (runs, failures, min_margin)) in &rows {
            out.push_str(&format!(
                "{name:<28}{runs:>8}{failures:>10}{:>16}\n",
                fmt9(*min_margin)
            ));
        }
        out.push_str(&format!(
            "total: {} checks, {} failures\n",
            self.summary.checks_run, self.summary.failures
        ));
        out.push_str(&format!(
            "max theorem2 margin = {} bits\n",
            fmt9(self.summary.max_theorem2_margin)
        ));
        out.push_str(&format!(
            "max theorem3 margin = {} bits\n",
            fmt9(self.summary.max_theorem3_margin)
        ));
        out
    }
}

/// The fixed structured states exercised alongside random sweeps.
pub fn structured_suite() -> Vec<(String, DensityMatrix)> {
    vec![
        ("bell".into(), bell_state()),
        (
            "product-mixed".into(),
            product_state(&maximally_mixed(2), &maximally_mixed(2)).expect("valid product"),
        ),
        (
            "product-ginibre".into(),
            product_state(
                &random_density(2, 2, 101).expect("valid"),
                &random_density(2, 2, 102).expect("valid"),
            )
            .expect("valid product"),
        ),
        (
            "classical-2x2".into(),
            classical_state(&[0.4, 0.1, 0.1, 0.4], 2, 2).expect("valid classical state"),
        ),
        (
            "classical-2x3".into(),
            classical_state(&[0.25, 0.15, 0.1, 0.05, 0.2, 0.25], 2, 3)
                .expect("valid classical state"),
        ),
        (
            "rank-deficient-2x2".into(),
            random_bipartite(2, 2, 2, 103).expect("valid"),
        ),
    ]
}

struct SweepUnit {
    descriptor: String,
    rho: DensityMatrix,
    povm_a: Povm,
    povm_b: Povm,
    projective_b: Povm,
    sigma: DensityMatrix,
    include_theorem1: bool,
}

/// Run every check over the configured states. Deterministic in the seed;
/// report order is stable (structured suite first, then random states in
/// index order, checks in a fixed order per state).
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutcome, VerifyError> {
    sweep_impl(cfg, false)
}

/// Sequential fallback of [`run_sweep`]; identical output, used by
/// benchmarks and the no-`parallel` build.
pub fn run_sweep_sequential(cfg: &SweepConfig) -> Result<SweepOutcome, VerifyError> {
    sweep_impl(cfg, true)
}

fn sweep_impl(cfg: &SweepConfig, sequential: bool) -> Result<SweepOutcome, VerifyError> {
    cfg.validate()?;
    let mut units: Vec<SweepUnit> = Vec::new();

    if cfg.structured {
        for (name, rho) in structured_suite() {
            let (d_a, d_b) = rho.split().expect("structured states are bipartite");
            units.push(SweepUnit {
                descriptor: name,
                povm_a: Povm::computational(d_a),
                povm_b: Povm::computational(d_b),
                projective_b: Povm::computational(d_b),
                sigma: random_bipartite(d_a, d_b, d_a * d_b, cfg.seed.wrapping_add(7))?,
                rho,
                include_theorem1: true,
            });
        }
    }

    for i in 0..cfg.count {
        let (d_a, d_b) = cfg.dims[i % cfg.dims.len()];
        let state_seed = cfg.seed.wrapping_add(1000 * (i as u64 + 1));
        let rho = random_bipartite(d_a, d_b, d_a * d_b, state_seed)?;
        // Rank-one measurements (the class the entropy inequalities cover),
        // with outcome counts cycling over d..=d^2.
        let k_a = d_a + i % (d_a * d_a - d_a + 1);
        let k_b = d_b + i % (d_b * d_b - d_b + 1);
        let povm_a = random_rank1_povm(d_a, k_a, state_seed + 1)?;
        let povm_b = random_rank1_povm(d_b, k_b, state_seed + 2)?;
        let basis_state = random_density(d_b, d_b, state_seed + 3)?;
        let projective_b = Povm::from_basis_columns(basis_state.eigenvectors())?;
        let sigma = random_bipartite(d_a, d_b, d_a * d_b, state_seed + 4)?;
        units.push(SweepUnit {
            descriptor: format!("ginibre-{d_a}x{d_b}-#{i}"),
            rho,
            povm_a,
            povm_b,
            projective_b,
            sigma,
            include_theorem1: false,
        });
    }

    let per_unit = exec::run_indexed(units.len(), sequential, |i| {
        run_unit(&units[i], &cfg.optimizer, sequential)
    });
    let mut reports = Vec::new();
    for unit_reports in per_unit {
        reports.extend(unit_reports?);
    }

    let failures = reports.iter().filter(|r| !r.passed).count();
    let max_margin = |name: &str| {
        reports
            .iter()
            .filter(|r| r.check_name == name)
            .map(|r| r.margin)
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let summary = SweepSummary {
        checks_run: reports.len(),
        failures,
        max_theorem2_margin: max_margin("theorem2"),
        max_theorem3_margin: max_margin("theorem3"),
    };
    Ok(SweepOutcome { summary, reports })
}

fn run_unit(
    unit: &SweepUnit,
    optimizer: &OptimizerConfig,
    sequential: bool,
) -> Result<Vec<CheckReport>, VerifyError> {
    let desc = unit.descriptor.as_str();
    let rho = &unit.rho;
    let mut reports = Vec::with_capacity(12);

    reports.extend(check_lemma1(rho, &unit.povm_a, &unit.povm_b, desc)?);

    // H(A|beta) <= H(alpha|beta) for the same measurement pair.
    let table = joint_distribution(rho, &unit.povm_a, &unit.povm_b)?;
    let classical_cond = shannon_entropy(table.flat()) - shannon_entropy(&table.marginal_b());
    reports.push(CheckReport::inequality(
        "eq7_conditional",
        desc,
        conditional_entropy_given(rho, &unit.povm_b)?,
        classical_cond,
        1e-9,
    ));

    if unit.include_theorem1 {
        reports.push(check_theorem1_mode(rho, optimizer, desc, sequential)?);
    }
    reports.push(check_theorem2(rho, &unit.povm_b, desc)?);
    reports.extend(check_theorem2_proof_steps(rho, &unit.projective_b, desc)?);
    reports.push(check_theorem3_mode(rho, &unit.povm_b, optimizer, desc, sequential)?);

    // Mixture reconstruction: conditionals average back to the marginal.
    let (rho_a, _) = marginals(rho)?;
    let d_a = rho_a.dim();
    let mut mix = CMatrix::zeros(d_a, d_a);
    let mut weights = Vec::new();
    let mut states = Vec::new();
    for m in unit.povm_b.elements() {
        if let Some((state, p)) = conditional_state(rho, m)? {
            mix += state.matrix().scale(p);
            weights.push(p);
            states.push(state);
        }
    }
    reports.push(CheckReport::inequality(
        "mixture_reconstruction",
        desc,
        max_abs_diff(&mix, rho_a.matrix()),
        0.0,
        1e-9,
    ));

    // Entropy defect of the conditional ensemble is nonnegative.
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    let ensemble = Ensemble::new(weights, states)?;
    reports.push(CheckReport::inequality(
        "entropy_defect_nonneg",
        desc,
        0.0,
        entropy_defect(&ensemble),
        1e-9,
    ));

    // Relative entropy is monotone under the partial trace.
    let joint_re = relative_entropy(rho, &unit.sigma)?;
    let (_, rho_b) = marginals(rho)?;
    let (_, sigma_b) = marginals(&unit.sigma)?;
    let reduced_re = relative_entropy(&rho_b, &sigma_b)?;
    reports.push(CheckReport::inequality(
        "relent_monotonicity",
        desc,
        reduced_re,
        joint_re,
        1e-9,
    ));

    Ok(reports)
}
