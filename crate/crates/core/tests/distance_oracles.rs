//! Worked examples with independently derived expected values.

use conedist_core::distance::{
    alternative_check, build_rank_one, distance_dual, distance_rank_one_search, phi, quantity4,
    reciprocal_sup, verify_equalities, AlternativeOutcome, Mode, QChannel, SolveConfig,
};
use conedist_core::norms::NormKind;
use conedist_core::process::operator_norm;
use conedist_core::svd::smallest_singular_value;
use conedist_core::{Block64, Cone64, Mat64, NormedSpace, Process64, Vec64};

fn cfg() -> SolveConfig<f64> {
    SolveConfig {
        budget: 400,
        seed: 7,
        ..SolveConfig::default()
    }
}

fn l2_process(a: Mat64, cone: Cone64) -> Process64 {
    let (m, n) = (a.rows(), a.cols());
    Process64::new(
        NormedSpace::new(n, NormKind::L2),
        NormedSpace::new(m, NormKind::L2),
        a,
        cone,
    )
    .unwrap()
}

fn polyhedral_process(a: Mat64, cone: Cone64, x: NormKind, y: NormKind) -> Process64 {
    let (m, n) = (a.rows(), a.cols());
    Process64::new(NormedSpace::new(n, x), NormedSpace::new(m, y), a, cone).unwrap()
}

fn diag31() -> Mat64 {
    Mat64::from_rows(&[vec![3.0, 0.0], vec![0.0, 1.0]])
}

/// Masked single-entry block: only A[0][0] can be perturbed.
fn masked_block(norm: NormKind) -> Block64 {
    Block64::new(
        0,
        Mat64::from_rows(&[vec![1.0], vec![0.0]]),
        Mat64::from_rows(&[vec![1.0, 0.0]]),
        NormedSpace::new(1, norm),
        NormedSpace::new(1, norm),
    )
    .unwrap()
}

#[test]
fn eckart_young_unstructured_sampled() {
    // Oracle: the smallest singular value.
    let f = l2_process(diag31(), Cone64::full(2));
    let blocks = vec![Block64::unstructured(&f)];
    let (alpha, cert) = distance_dual(&f, &blocks, Mode::Sampled, &cfg()).unwrap();
    let sigma = smallest_singular_value(&f.matrix);
    assert!(
        (alpha.get() - sigma).abs() <= 1e-3,
        "alpha = {alpha}, sigma_min = {sigma}"
    );
    assert!(cert.unwrap().residual < 1e-9);
}

#[test]
fn masked_entry_exact_distance_is_three() {
    // Oracle: A + t e1 e1^T = diag(3 + t, 1) is singular only at t = -3.
    let f = polyhedral_process(diag31(), Cone64::full(2), NormKind::L1, NormKind::Linf);
    let blocks = vec![masked_block(NormKind::L1)];
    let (alpha, cert) = distance_dual(&f, &blocks, Mode::Exact, &cfg()).unwrap();
    assert!(
        (alpha.get() - 3.0).abs() <= 1e-9,
        "masked distance should be 3, got {alpha}"
    );
    let cert = cert.unwrap();
    assert!(cert.residual <= 1e-9);
    assert!(cert.recompute_residual(&f, &blocks) <= 1e-9);
}

#[test]
fn all_p_zero_is_infinite() {
    let f = polyhedral_process(diag31(), Cone64::full(2), NormKind::L1, NormKind::Linf);
    let block = Block64::new(
        0,
        Mat64::zeros(2, 1),
        Mat64::from_rows(&[vec![1.0, 0.0]]),
        NormedSpace::new(1, NormKind::L1),
        NormedSpace::new(1, NormKind::L1),
    )
    .unwrap();
    let (alpha, cert) = distance_dual(&f, &[block], Mode::Exact, &cfg()).unwrap();
    assert!(alpha.is_infinite());
    assert!(cert.is_none());
}

#[test]
fn nonsurjective_input_short_circuits_to_zero() {
    let f = l2_process(Mat64::identity(2), Cone64::nonneg_orthant(2));
    let blocks = vec![Block64::unstructured(&f)];
    let (alpha, cert) = distance_dual(&f, &blocks, Mode::Sampled, &cfg()).unwrap();
    assert_eq!(alpha.get(), 0.0);
    let cert = cert.unwrap();
    assert!(cert.z.iter().all(|&z| z == 0.0));
    assert!(cert.residual <= 1e-9);
}

#[test]
fn renegar_style_cone_instance() {
    // Grid oracle: min over the unit circle of ‖(A^T y)_+‖_2.
    let a = Mat64::from_rows(&[vec![1.0, 0.0, -1.0], vec![0.0, 1.0, -1.0]]);
    let f = l2_process(a.clone(), Cone64::nonneg_orthant(3));
    let blocks = vec![Block64::unstructured(&f)];

    let mut oracle = f64::INFINITY;
    let steps = 100_000;
    for i in 0..steps {
        let theta = 2.0 * std::f64::consts::PI * (i as f64) / (steps as f64);
        let y = Vec64::from_slice(&[theta.cos(), theta.sin()]);
        let aty = a.matvec_transpose(&y);
        let clipped = Vec64::from_fn(3, |j| aty[j].max(0.0));
        oracle = oracle.min(clipped.euclid());
    }

    let (alpha, _) = distance_dual(&f, &blocks, Mode::Sampled, &cfg()).unwrap();
    assert!(
        (alpha.get() - oracle).abs() <= 1e-3,
        "alpha = {alpha}, grid oracle = {oracle}"
    );
    // The analytic value for this instance.
    assert!((alpha.get() - 0.618034).abs() <= 1e-4);
}

#[test]
fn rank_one_builder_formula() {
    // Qx = (1, 0), v = (0, 1): T = [[0, 0], [1, 0]] with unit norm.
    let f = l2_process(Mat64::identity(2), Cone64::full(2));
    let block = Block64::unstructured(&f);
    let x = Vec64::from_slice(&[1.0, 0.0]);
    let v = Vec64::from_slice(&[0.0, 1.0]);
    let t = build_rank_one(&x, &v, &block).unwrap();
    assert_eq!(t.matvec(&x).as_slice(), &[0.0, 1.0]);
    assert!((operator_norm(&t, &block.u_space, &block.v_space).unwrap() - 1.0).abs() < 1e-12);

    // v = 0 gives the zero map.
    let t = build_rank_one(&x, &Vec64::zeros(2), &block).unwrap();
    assert!(t.is_zero(0.0));

    // Qx = (3, 4) under L2: T(3,4) = (1,0) and ‖T‖ = 1/5.
    let x = Vec64::from_slice(&[3.0, 4.0]);
    let v = Vec64::from_slice(&[1.0, 0.0]);
    let t = build_rank_one(&x, &v, &block).unwrap();
    let image = t.matvec(&x);
    assert!((image[0] - 1.0).abs() < 1e-12 && image[1].abs() < 1e-12);
    assert!((operator_norm(&t, &block.u_space, &block.v_space).unwrap() - 0.2).abs() < 1e-12);

    // Qx = 0 is an error.
    assert!(build_rank_one(&Vec64::zeros(2), &v, &block).is_err());
}

#[test]
fn rank_one_search_reaches_masked_distance() {
    let f = polyhedral_process(diag31(), Cone64::full(2), NormKind::L1, NormKind::Linf);
    let blocks = vec![masked_block(NormKind::L1)];
    let (alpha3, cert3) = distance_dual(&f, &blocks, Mode::Exact, &cfg()).unwrap();
    let (alpha2, cert2) = conedist_core::distance::search_rank_one(
        &f,
        &blocks,
        Mode::Exact,
        &cfg(),
        cert3.as_ref(),
    )
    .unwrap();
    assert!(
        (alpha2.get() - alpha3.get()).abs() <= 1e-6,
        "q2 = {alpha2}, q3 = {alpha3}"
    );
    let cert = cert2.unwrap();
    assert!(cert.residual <= 1e-9);
    assert!(cert.assignment.rank_one.iter().all(|&r| r));
    let perturbed = f.perturb(&blocks, &cert.assignment).unwrap();
    assert!(!perturbed.is_surjective().unwrap());
}

#[test]
fn rank_one_search_standalone_upper_bound() {
    // Without hints the search still returns a certified upper bound.
    let f = polyhedral_process(diag31(), Cone64::full(2), NormKind::L1, NormKind::Linf);
    let blocks = vec![masked_block(NormKind::L1)];
    let (alpha, cert) = distance_rank_one_search(&f, &blocks, Mode::Exact, &cfg()).unwrap();
    assert!(alpha.is_finite());
    assert!(alpha.get() >= 3.0 - 1e-6, "upper bound {alpha} below the distance");
    assert!(cert.is_some());
}

#[test]
fn phi_scalar_example() {
    // m = n = 1, A = 1, K = R, Q = 1, y1 = 2: the constraint 2w = x forces
    // w/|x| = 1/2.
    let f = polyhedral_process(
        Mat64::from_rows(&[vec![1.0]]),
        Cone64::full(1),
        NormKind::L1,
        NormKind::L1,
    );
    let channels = vec![QChannel {
        q: Mat64::identity(1),
        u_space: NormedSpace::new(1, NormKind::L1),
    }];
    let y_list = vec![Vec64::from_slice(&[2.0])];
    let eval = phi(&f, &channels, &y_list, Mode::Exact, &cfg()).unwrap();
    assert!((eval.value.get() - 0.5).abs() <= 1e-9, "phi = {}", eval.value);
    assert!(eval.pairing_min >= -1e-9);
    assert!(eval.residual <= 1e-9);

    // Positive scaling: Φ((c y)) = Φ((y))/c.
    let scaled = vec![Vec64::from_slice(&[6.0])];
    let eval_scaled = phi(&f, &channels, &scaled, Mode::Exact, &cfg()).unwrap();
    assert!((eval_scaled.value.get() - 0.5 / 3.0).abs() <= 1e-9);
}

#[test]
fn phi_zero_targets_is_infinite() {
    let f = polyhedral_process(diag31(), Cone64::full(2), NormKind::L1, NormKind::Linf);
    let channels = vec![QChannel {
        q: Mat64::identity(2),
        u_space: NormedSpace::new(2, NormKind::L1),
    }];
    let y_list = vec![Vec64::zeros(2)];
    let eval = phi(&f, &channels, &y_list, Mode::Exact, &cfg()).unwrap();
    assert!(eval.value.is_infinite());
}

#[test]
fn quantity4_matches_dual_on_masked_instance() {
    let f = polyhedral_process(diag31(), Cone64::full(2), NormKind::L1, NormKind::Linf);
    let blocks = vec![masked_block(NormKind::L1)];
    let (alpha3, cert3) = distance_dual(&f, &blocks, Mode::Exact, &cfg()).unwrap();
    let seeds = vec![conedist_core::distance::dual_seed_directions(
        &blocks,
        cert3.as_ref().unwrap(),
    )];
    let (alpha4, _, eval) = quantity4(&f, &blocks, Mode::Exact, &cfg(), &seeds).unwrap();
    assert!(
        (alpha4.get() - alpha3.get()).abs() <= 1e-6,
        "q4 = {alpha4}, q3 = {alpha3}"
    );
    assert!(eval.unwrap().residual <= 1e-9);
}

#[test]
fn alternative_scalar_examples() {
    let cfgv = cfg();
    // A = 1, K = R, Q = 1, y1 = 1: system (i) needs |w| < w, impossible.
    let f = polyhedral_process(
        Mat64::from_rows(&[vec![1.0]]),
        Cone64::full(1),
        NormKind::L1,
        NormKind::L1,
    );
    let channels = vec![QChannel {
        q: Mat64::identity(1),
        u_space: NormedSpace::new(1, NormKind::L1),
    }];
    let y_list = vec![Vec64::from_slice(&[1.0])];
    match alternative_check(&f, &channels, &y_list, &cfgv).unwrap() {
        AlternativeOutcome::SystemII { y_star, .. } => {
            assert!(y_star.max_abs() > 0.5);
        }
        other => panic!("expected system (ii), got {other:?}"),
    }

    // Q = 0: ‖Qx‖ = 0 < w is easy, system (i).
    let channels_zero = vec![QChannel {
        q: Mat64::zeros(1, 1),
        u_space: NormedSpace::new(1, NormKind::L1),
    }];
    match alternative_check(&f, &channels_zero, &y_list, &cfgv).unwrap() {
        AlternativeOutcome::SystemI { x, w, margin } => {
            assert!(margin > 1e-9);
            assert!((f.matrix.matvec(&x)[0] - w[0] * 1.0).abs() <= 1e-9);
        }
        other => panic!("expected system (i), got {other:?}"),
    }

    // A = 1, K = R_+, Q = 1, y1 = -1: only the dual system solves.
    let f_halfline = polyhedral_process(
        Mat64::from_rows(&[vec![1.0]]),
        Cone64::nonneg_orthant(1),
        NormKind::L1,
        NormKind::L1,
    );
    let y_neg = vec![Vec64::from_slice(&[-1.0])];
    match alternative_check(&f_halfline, &channels, &y_neg, &cfgv).unwrap() {
        AlternativeOutcome::SystemII { y_star, .. } => {
            assert!(y_star[0] < 0.0);
        }
        other => panic!("expected system (ii), got {other:?}"),
    }
}

#[test]
fn reciprocal_on_masked_instance() {
    let f = polyhedral_process(diag31(), Cone64::full(2), NormKind::L1, NormKind::Linf);
    let blocks = vec![masked_block(NormKind::L1)];
    let (alpha, _) = distance_dual(&f, &blocks, Mode::Exact, &cfg()).unwrap();
    let (sampled, polished) = reciprocal_sup(&f, &blocks[0], &cfg()).unwrap();
    let recip = 1.0 / alpha.get();
    assert!(sampled <= recip + 1e-9);
    assert!(
        (polished.get() - recip).abs() <= 1e-6 * recip,
        "polished sup {polished} vs 1/alpha {recip}"
    );
}

#[test]
fn verify_equalities_masked_instance() {
    let f = polyhedral_process(diag31(), Cone64::full(2), NormKind::L1, NormKind::Linf);
    let blocks = vec![masked_block(NormKind::L1)];
    let report = verify_equalities(&f, &blocks, Mode::Exact, 1e-6, &cfg()).unwrap();
    assert!(report.all_passed(), "failures: {:?}", report.failures());
    for q in [
        report.quantities.general_upper,
        report.quantities.rank_one,
        report.quantities.dual,
        report.quantities.phi_inf,
    ] {
        assert!((q.get() - 3.0).abs() <= 1e-5, "quantity {q} should be 3");
    }
}

#[test]
fn verify_equalities_nonsurjective_is_all_zero() {
    let f = l2_process(Mat64::identity(2), Cone64::nonneg_orthant(2));
    let blocks = vec![Block64::unstructured(&f)];
    let report = verify_equalities(&f, &blocks, Mode::Sampled, 1e-6, &cfg()).unwrap();
    assert!(report.all_passed(), "failures: {:?}", report.failures());
    assert_eq!(report.quantities.dual.get(), 0.0);
    assert_eq!(report.quantities.rank_one.get(), 0.0);
    assert!(!report.surjective);
}
