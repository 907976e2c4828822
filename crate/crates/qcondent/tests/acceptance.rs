//! End-to-end acceptance suite: one test per criterion, each printing a
//! PASS line when it completes (run with `--nocapture` to see them).
//!
//! Optimization results are computed once per state and shared across the
//! criteria that consume them, so the self-consistency criterion checks the
//! exact results the earlier criteria reported.

use qcondent::matkernel::{identity, max_abs_diff, tensor_product};
use qcondent::measure::{
    classical_mutual_information, conditional_entropy_given, joint_distribution, naimark_dilate,
    outcome_distribution, random_rank1_povm, shannon_entropy, Povm,
};
use qcondent::optimize::{
    decode_povm, maximize_mutual_information, minimize_conditional_entropy, PovmParams,
};
use qcondent::qstate::{
    bell_state, classical_state, marginals, random_bipartite, random_density, von_neumann_entropy,
    DensityMatrix,
};
use qcondent::verify::{check_theorem2, check_theorem3, run_sweep, SweepConfig};
use qcondent::{OptimizationResult, OptimizerConfig};
use std::sync::OnceLock;

fn cfg() -> OptimizerConfig {
    OptimizerConfig::default()
}

struct OptimizedState {
    label: String,
    rho: DensityMatrix,
    minimum: OptimizationResult,
    maximum: OptimizationResult,
}

fn optimize_state(label: &str, rho: DensityMatrix) -> OptimizedState {
    let minimum = minimize_conditional_entropy(&rho, &cfg()).expect("minimize");
    let maximum = maximize_mutual_information(&rho, &cfg()).expect("maximize");
    OptimizedState {
        label: label.to_string(),
        rho,
        minimum,
        maximum,
    }
}

fn bell_results() -> &'static OptimizedState {
    static CELL: OnceLock<OptimizedState> = OnceLock::new();
    CELL.get_or_init(|| optimize_state("bell", bell_state()))
}

fn product_results() -> &'static Vec<(f64, OptimizedState)> {
    static CELL: OnceLock<Vec<(f64, OptimizedState)>> = OnceLock::new();
    CELL.get_or_init(|| {
        (0u64..20)
            .map(|i| {
                let (d_a, d_b) = if i % 2 == 0 { (2, 2) } else { (2, 3) };
                let a = random_density(d_a, d_a, 200 + i).expect("state");
                let b = random_density(d_b, d_b, 300 + i).expect("state");
                let rho = qcondent::qstate::product_state(&a, &b).expect("product");
                let h_a = von_neumann_entropy(&a);
                (h_a, optimize_state(&format!("product-{i}"), rho))
            })
            .collect()
    })
}

/// Seeded random probability table over `n` cells.
fn random_table(n: usize, seed: u64) -> Vec<f64> {
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut p: Vec<f64> = (0..n).map(|_| rng.random_range(0.02..1.0)).collect();
    let total: f64 = p.iter().sum();
    for v in &mut p {
        *v /= total;
    }
    p
}

fn classical_conditional_entropy(p: &[f64], d_a: usize, d_b: usize) -> f64 {
    let mut p_b = vec![0.0; d_b];
    for a in 0..d_a {
        for b in 0..d_b {
            p_b[b] += p[a * d_b + b];
        }
    }
    shannon_entropy(p) - shannon_entropy(&p_b)
}

fn classical_mutual_information_table(p: &[f64], d_a: usize, d_b: usize) -> f64 {
    let mut p_a = vec![0.0; d_a];
    let mut p_b = vec![0.0; d_b];
    for a in 0..d_a {
        for b in 0..d_b {
            p_a[a] += p[a * d_b + b];
            p_b[b] += p[a * d_b + b];
        }
    }
    shannon_entropy(&p_a) + shannon_entropy(&p_b) - shannon_entropy(p)
}

struct ClassicalCase {
    p: Vec<f64>,
    d_a: usize,
    d_b: usize,
    state: OptimizedState,
}

fn classical_results() -> &'static Vec<ClassicalCase> {
    static CELL: OnceLock<Vec<ClassicalCase>> = OnceLock::new();
    CELL.get_or_init(|| {
        (0u64..10)
            .map(|i| {
                let (d_a, d_b) = if i % 2 == 0 { (2, 2) } else { (2, 3) };
                let p = random_table(d_a * d_b, 400 + i);
                let rho = classical_state(&p, d_a, d_b).expect("classical state");
                ClassicalCase {
                    p,
                    d_a,
                    d_b,
                    state: optimize_state(&format!("classical-{i}"), rho),
                }
            })
            .collect()
    })
}

#[test]
fn criterion_1_bell_state_suite() {
    let rho = bell_state();
    let (rho_a, rho_b) = marginals(&rho).unwrap();
    assert!(von_neumann_entropy(&rho).abs() <= 1e-9);
    assert!((von_neumann_entropy(&rho_a) - 1.0).abs() <= 1e-9);
    assert!((von_neumann_entropy(&rho_b) - 1.0).abs() <= 1e-9);

    let res = bell_results();
    assert!(
        res.minimum.value <= 1e-6,
        "H(A|B) bound {} above 1e-6",
        res.minimum.value
    );
    assert!(
        res.maximum.value >= 0.999 && res.maximum.value <= 1.0 + 1e-9,
        "I(A;B) bound {} outside [0.999, 1 + 1e-9]",
        res.maximum.value
    );

    let t2 = check_theorem2(&rho, &Povm::computational(2), "bell").unwrap();
    assert!(
        (t2.margin - 1.0).abs() <= 1e-6,
        "theorem-2 margin {} not 1 bit",
        t2.margin
    );
    println!("acceptance criterion 1 (Bell-state suite): PASS");
}

#[test]
fn criterion_2_product_state_suite() {
    for (h_a, state) in product_results() {
        assert!(
            (state.minimum.value - h_a).abs() <= 1e-6,
            "{}: |H(A|B) bound - H(A)| = {:e}",
            state.label,
            (state.minimum.value - h_a).abs()
        );
        assert!(
            state.maximum.value <= 1e-6,
            "{}: I(A;B) bound {} above 1e-6",
            state.label,
            state.maximum.value
        );
    }
    println!("acceptance criterion 2 (product-state suite, 20 seeds): PASS");
}

#[test]
fn criterion_3_classical_embedding_suite() {
    for case in classical_results() {
        let h_cond = classical_conditional_entropy(&case.p, case.d_a, case.d_b);
        let mi = classical_mutual_information_table(&case.p, case.d_a, case.d_b);
        assert!(
            (case.state.minimum.value - h_cond).abs() <= 1e-4,
            "{}: H(A|B) bound {} vs classical {}",
            case.state.label,
            case.state.minimum.value,
            h_cond
        );
        assert!(
            (case.state.maximum.value - mi).abs() <= 1e-3,
            "{}: I(A;B) bound {} vs classical {}",
            case.state.label,
            case.state.maximum.value,
            mi
        );

        let comp_b = Povm::computational(case.d_b);
        let t2 = check_theorem2(&case.state.rho, &comp_b, &case.state.label).unwrap();
        assert!(
            t2.margin.abs() <= 1e-6,
            "{}: theorem-2 margin {}",
            case.state.label,
            t2.margin
        );
        let t3 = check_theorem3(&case.state.rho, &comp_b, &cfg(), &case.state.label).unwrap();
        assert!(
            t3.margin.abs() <= 1e-6,
            "{}: theorem-3 margin {}",
            case.state.label,
            t3.margin
        );
    }
    println!("acceptance criterion 3 (classical-embedding suite): PASS");
}

#[test]
fn criterion_4_random_sweep_is_clean() {
    let outcome = run_sweep(&SweepConfig::default()).unwrap();
    assert_eq!(
        outcome.summary.failures,
        0,
        "sweep failures:\n{}",
        outcome.summary_table()
    );
    assert_eq!(outcome.summary.checks_run, 2400);
    println!("acceptance criterion 4 (200-state random sweep): PASS");
}

#[test]
fn criterion_5_naimark_dilation_statistics() {
    for i in 0..100u64 {
        let (d_a, d_b) = if i % 2 == 0 { (2, 2) } else { (2, 3) };
        let rho = random_bipartite(d_a, d_b, d_a * d_b, 500 + i).unwrap();
        let k = (d_b + i as usize % (d_b * d_b - d_b + 1)).max(2);
        let povm = match i % 3 {
            0 => decode_povm(&PovmParams::random(d_b, k, 600 + i)),
            1 => random_rank1_povm(d_b, k, 600 + i).unwrap(),
            _ => {
                let basis = random_density(d_b, d_b, 600 + i).unwrap();
                Povm::from_basis_columns(basis.eigenvectors()).unwrap()
            }
        };
        let dil = naimark_dilate(&povm);

        // Single-system statistics on the measured subsystem.
        let (_, rho_b) = marginals(&rho).unwrap();
        let direct = outcome_distribution(&rho_b, &povm).unwrap();
        let ext_b = &dil.isometry * rho_b.matrix() * dil.isometry.adjoint();
        let ext_b = DensityMatrix::new(ext_b, None).unwrap();
        let dilated = outcome_distribution(&ext_b, &dil.projective).unwrap();
        for (p, q) in direct.probs().iter().zip(dilated.probs()) {
            assert!((p - q).abs() <= 1e-10, "pair {i}: probability mismatch");
        }

        // Conditional entropy computed through the dilated joint state.
        let h_direct = conditional_entropy_given(&rho, &povm).unwrap();
        let ext_iso = tensor_product(&identity(d_a), &dil.isometry);
        let ext = &ext_iso * rho.matrix() * ext_iso.adjoint();
        let ext_rho = DensityMatrix::new(ext, None)
            .unwrap()
            .with_split(d_a, dil.extended_dim())
            .unwrap();
        let h_dilated = conditional_entropy_given(&ext_rho, &dil.projective).unwrap();
        assert!(
            (h_direct - h_dilated).abs() <= 1e-9,
            "pair {i}: H(A|beta) direct {h_direct} vs dilated {h_dilated}"
        );
    }
    println!("acceptance criterion 5 (Naimark dilation, 100 pairs): PASS");
}

#[test]
fn criterion_6_optimizer_sanity() {
    // Monotone prefix minima over growing restart budgets, fixed seeds.
    let rho = random_bipartite(2, 2, 4, 700).unwrap();
    let mut prev = f64::INFINITY;
    for restarts in 1..=10 {
        let res = minimize_conditional_entropy(
            &rho,
            &OptimizerConfig {
                restarts,
                max_evals: 400,
                ..OptimizerConfig::default()
            },
        )
        .unwrap();
        assert!(
            res.value <= prev + 1e-12,
            "restarts {restarts}: {} after {}",
            res.value,
            prev
        );
        prev = res.value;
    }

    // Self-consistency of every stored result from criteria 1-3.
    let mut all: Vec<&OptimizedState> = vec![bell_results()];
    all.extend(product_results().iter().map(|(_, s)| s));
    all.extend(classical_results().iter().map(|c| &c.state));
    for state in all {
        let re_min = conditional_entropy_given(&state.rho, &state.minimum.best_povm_b).unwrap();
        assert!(
            (re_min - state.minimum.value).abs() <= 1e-9,
            "{}: re-evaluated minimum {} vs stored {}",
            state.label,
            re_min,
            state.minimum.value
        );
        let povm_a = state.maximum.best_povm_a.as_ref().expect("pair stored");
        let table = joint_distribution(&state.rho, povm_a, &state.maximum.best_povm_b).unwrap();
        let re_max = classical_mutual_information(&table);
        assert!(
            (re_max - state.maximum.value).abs() <= 1e-9,
            "{}: re-evaluated maximum {} vs stored {}",
            state.label,
            re_max,
            state.maximum.value
        );
    }
    println!("acceptance criterion 6 (optimizer sanity): PASS");
}
