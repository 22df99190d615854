//! End-to-end checks of the decision pipeline on the reference instances.

use simcheck_core::attack::{find_attack_channel, validate_channel, AttackError, AttackRequest};
use simcheck_core::fixtures;
use simcheck_core::linalg::{self, default_rank_tol, Matrix};
use simcheck_core::lp::{self, LpProblem, FEASIBILITY_TOL};
use simcheck_core::oracle;
use simcheck_core::pmf::binary_symmetric_erasure;
use simcheck_core::simulatability::{
    build_system, check_simulatability, consistency, farkas_check, farkas_check_reduced,
    g_inverse_variant, CheckOptions, Direction, HStarSign, LinearSystem, LpPath, SimError,
    VerdictReason,
};

fn system_2x2x3() -> LinearSystem {
    let p = fixtures::simulatable_2x2x3();
    build_system(&p.marginal_yz(), &p.marginal_yx()).unwrap()
}

#[test]
fn reference_system_has_rank_five() {
    let sys = system_2x2x3();
    let report = consistency(&sys, default_rank_tol(sys.m(), sys.n())).unwrap();
    assert!(report.consistent);
    assert_eq!(report.rank_a, 5);
    assert_eq!(report.rank_aug, 5);
}

#[test]
fn reference_pseudoinverse_solution() {
    let sys = system_2x2x3();
    let pinv = linalg::pinv(sys.a_big(), default_rank_tol(sys.m(), sys.n())).unwrap();
    let b = pinv.matvec(sys.c_vec());
    let expect = [0.9762, 0.0238, 0.5952, 0.4048, 0.4524, 0.5476];
    for (got, want) in b.iter().zip(expect.iter()) {
        assert!((got - want).abs() < 1e-3, "{got} vs {want}");
    }
}

#[test]
fn reference_instance_holds_on_both_lp_paths() {
    let sys = system_2x2x3();
    let pinv = linalg::pinv(sys.a_big(), default_rank_tol(sys.m(), sys.n())).unwrap();
    assert_eq!(farkas_check(&sys, &pinv).unwrap().sign, HStarSign::Zero);
    assert_eq!(farkas_check_reduced(&sys).unwrap().sign, HStarSign::Zero);

    let p = fixtures::simulatable_2x2x3();
    for path in [LpPath::Auto, LpPath::Full, LpPath::Reduced] {
        let opts = CheckOptions {
            lp_path: path,
            ..CheckOptions::default()
        };
        let verdict = check_simulatability(&p, Direction::YFixedZToX, &opts).unwrap();
        assert!(verdict.holds);
        assert_eq!(verdict.reason, VerdictReason::HStarZero);
        assert_eq!(verdict.h_star, Some(0.0));
    }
}

#[test]
fn reference_attack_with_weighted_cost() {
    let sys = system_2x2x3();
    let cost = vec![2.0, 2.0, 2.0, 1.0, 1.0, 1.0];
    let req = AttackRequest::with_cost(&sys, cost.clone()).unwrap();
    let channel = find_attack_channel(&req).unwrap();

    let p = fixtures::simulatable_2x2x3();
    let (a, c) = (p.marginal_yz(), p.marginal_yx());
    assert!(validate_channel(&a, &c, &channel, FEASIBILITY_TOL).unwrap());

    let objective: f64 = (0..3)
        .flat_map(|r| (0..2).map(move |j| (r, j)))
        .map(|(r, j)| cost[r * 2 + j] * channel.prob(r, j))
        .sum();
    assert!((objective - 4.5).abs() < 1e-6);

    // The closed-form channel is itself valid at a much tighter tolerance.
    let known = fixtures::known_attack_channel_2x2x3();
    assert!(validate_channel(&a, &c, &known, 1e-9).unwrap());
}

#[test]
fn reference_attack_with_unit_cost_is_valid_but_not_pinned() {
    // Row-stochasticity fixes the unit-cost objective at |Z|, so any
    // feasible channel is optimal; only validity is asserted.
    let sys = system_2x2x3();
    let channel = find_attack_channel(&AttackRequest::new(&sys)).unwrap();
    let p = fixtures::simulatable_2x2x3();
    assert!(validate_channel(
        &p.marginal_yz(),
        &p.marginal_yx(),
        &channel,
        FEASIBILITY_TOL
    )
    .unwrap());
    let objective: f64 = (0..3)
        .flat_map(|r| (0..2).map(move |j| (r, j)))
        .map(|(r, j)| channel.prob(r, j))
        .sum();
    assert!((objective - 3.0).abs() < 1e-8);
}

#[test]
fn negative_instance_is_consistent_but_fails_the_sign_test() {
    let (a, c) = fixtures::nonsimulatable_pair_3y_4z_5x();
    let sys = build_system(&a, &c).unwrap();
    let report = consistency(&sys, default_rank_tol(sys.m(), sys.n())).unwrap();
    assert!(report.consistent);

    let pinv = linalg::pinv(sys.a_big(), default_rank_tol(sys.m(), sys.n())).unwrap();
    let full = farkas_check(&sys, &pinv).unwrap();
    assert_eq!(full.sign, HStarSign::Negative);
    assert!(full.objective < -1e-6);
    let reduced = farkas_check_reduced(&sys).unwrap();
    assert_eq!(reduced.sign, HStarSign::Negative);

    // The negative witness satisfies the multiplier conditions.
    let witness = full.witness.unwrap();
    assert!(witness.iter().all(|&t| t >= -FEASIBILITY_TOL));
    let ga = pinv.matmul(sys.a_big());
    let mut proj = Matrix::identity(sys.n());
    for i in 0..sys.n() {
        for j in 0..sys.n() {
            proj[(i, j)] -= ga[(i, j)];
        }
    }
    for v in proj.transpose().matvec(&witness) {
        assert!(v.abs() <= FEASIBILITY_TOL);
    }
    let bound = pinv.matvec(sys.c_vec());
    let value: f64 = witness.iter().zip(bound.iter()).map(|(t, b)| t * b).sum();
    assert!(value < 0.0);
}

#[test]
fn negative_instance_attack_is_refused_with_certificate() {
    let (a, c) = fixtures::nonsimulatable_pair_3y_4z_5x();
    let sys = build_system(&a, &c).unwrap();
    match find_attack_channel(&AttackRequest::new(&sys)) {
        Err(AttackError::NotSimulatable { certificate }) => {
            // Farkas conditions against the stacked system.
            let yb = sys.a_big().transpose().matvec(&certificate);
            assert!(yb.iter().all(|&v| v <= FEASIBILITY_TOL));
            let yc: f64 = certificate
                .iter()
                .zip(sys.c_vec().iter())
                .map(|(y, c)| y * c)
                .sum();
            assert!(yc >= FEASIBILITY_TOL);
        }
        other => panic!("expected NotSimulatable, got {other:?}"),
    }
}

#[test]
fn larger_positive_instance_synthesizes_a_tight_channel() {
    let (a, c) = fixtures::simulatable_pair_4y_6z_4x();
    let sys = build_system(&a, &c).unwrap();
    let report = consistency(&sys, default_rank_tol(sys.m(), sys.n())).unwrap();
    assert!(report.consistent);

    let pinv = linalg::pinv(sys.a_big(), default_rank_tol(sys.m(), sys.n())).unwrap();
    assert_eq!(farkas_check(&sys, &pinv).unwrap().sign, HStarSign::Zero);
    assert_eq!(farkas_check_reduced(&sys).unwrap().sign, HStarSign::Zero);

    let channel = find_attack_channel(&AttackRequest::new(&sys)).unwrap();
    assert!(validate_channel(&a, &c, &channel, FEASIBILITY_TOL).unwrap());
    for r in 0..channel.rows() {
        let sum: f64 = (0..channel.cols()).map(|j| channel.prob(r, j)).sum();
        assert!((sum - 1.0).abs() <= FEASIBILITY_TOL);
    }

    // The four-decimal reference channel passes at its rounding scale.
    let printed = fixtures::reference_channel_4y_6z_4x();
    assert!(validate_channel(&a, &c, &printed, 1e-3).unwrap());
}

#[test]
fn erasure_system_matches_the_block_pattern() {
    // alpha = 0.1, gamma = 0.5: pair-observation entries (1-a)g/2 = 0.225
    // and a*g/2 = 0.025, erasure column (1-g)/2 = 0.25, stacked into a
    // 9x10 system over the vectorized 5x2 channel.
    let p = binary_symmetric_erasure(0.1, 0.5).unwrap();
    let a = p.marginal_yz();
    let c = p.marginal_yx();
    let sys = build_system(&a, &c).unwrap();
    assert_eq!((sys.m(), sys.n()), (9, 10));

    let g = sys.a_big();
    // Top block is A kron I_2: row 0 interleaves A's row 0 with zeros.
    assert!((g[(0, 0)] - 0.225).abs() < 1e-15);
    assert_eq!(g[(0, 1)], 0.0);
    assert!((g[(0, 2)] - 0.025).abs() < 1e-15);
    assert!((g[(0, 8)] - 0.25).abs() < 1e-15);
    assert!((g[(1, 1)] - 0.225).abs() < 1e-15);
    assert!((g[(1, 9)] - 0.25).abs() < 1e-15);
    assert!((g[(2, 4)] - 0.025).abs() < 1e-15);
    assert!((g[(2, 6)] - 0.225).abs() < 1e-15);
    assert!((g[(3, 7)] - 0.225).abs() < 1e-15);
    // Bottom block pairs up the channel cells row by row.
    for k in 0..5 {
        for j in 0..10 {
            let expect = if j == 2 * k || j == 2 * k + 1 {
                1.0
            } else {
                0.0
            };
            assert_eq!(g[(4 + k, j)], expect);
        }
    }
    // Stacked rhs: the C rows then ones.
    let expect_c = [0.45, 0.05, 0.05, 0.45, 1.0, 1.0, 1.0, 1.0, 1.0];
    for (got, want) in sys.c_vec().iter().zip(expect_c.iter()) {
        assert!((got - want).abs() < 1e-15);
    }
}

#[test]
fn erasure_family_flips_exactly_at_the_threshold() {
    for (alpha, gamma, expect) in [
        (0.1, 0.70, false),
        (0.1, 0.80, true),
        (0.1, 0.90, true),
        (0.25, 0.50, true),
        (0.25, 0.49, false),
    ] {
        let p = binary_symmetric_erasure(alpha, gamma).unwrap();
        let verdict =
            check_simulatability(&p, Direction::YFixedZToX, &CheckOptions::default()).unwrap();
        assert_eq!(verdict.holds, expect, "alpha={alpha} gamma={gamma}");
    }
}

#[test]
fn erasure_family_verdict_is_a_single_step_in_gamma() {
    // Sweeping gamma must produce one false-to-true flip, located at
    // 1 - 2*alpha within one grid step.
    for alpha in [0.15, 0.3] {
        let mut previous: Option<bool> = None;
        let mut flips = 0usize;
        let mut flip_at = f64::NAN;
        for k in 1..50 {
            let gamma = k as f64 / 50.0;
            let p = binary_symmetric_erasure(alpha, gamma).unwrap();
            let holds = check_simulatability(&p, Direction::YFixedZToX, &CheckOptions::default())
                .unwrap()
                .holds;
            if let Some(prev) = previous {
                if prev != holds {
                    assert!(!prev && holds, "verdict must flip false -> true once");
                    flips += 1;
                    flip_at = gamma;
                }
            }
            previous = Some(holds);
        }
        assert_eq!(flips, 1, "alpha={alpha}");
        assert!((flip_at - (1.0 - 2.0 * alpha)).abs() <= 1.0 / 50.0 + 1e-12);
    }
}

#[test]
fn full_column_rank_reduces_to_a_sign_scan() {
    // |Y| >= |Z| with A of full column rank makes the stacked matrix full
    // column rank, so the reduced path needs no LP at all: the unique
    // solution's sign decides.
    let a = Matrix::from_rows(&[&[0.30, 0.05], &[0.05, 0.30], &[0.10, 0.20]]);

    // Positive side: plant a stochastic channel.
    let q_good = Matrix::from_rows(&[&[0.75, 0.25], &[0.2, 0.8]]);
    let sys = build_system(&a, &a.matmul(&q_good)).unwrap();
    let tol = default_rank_tol(sys.m(), sys.n());
    assert_eq!(linalg::numerical_rank(sys.a_big(), tol).unwrap(), sys.n());
    let check = farkas_check_reduced(&sys).unwrap();
    assert_eq!(check.sign, HStarSign::Zero);
    assert_eq!(check.lp_iterations, 0);

    // Negative side: the unique solution has a signed entry.
    let q_bad = Matrix::from_rows(&[&[1.1, -0.1], &[-0.05, 1.05]]);
    let c_bad = a.matmul(&q_bad);
    assert!(c_bad.data().iter().all(|&v| v >= 0.0));
    let sys = build_system(&a, &c_bad).unwrap();
    let check = farkas_check_reduced(&sys).unwrap();
    assert_eq!(check.sign, HStarSign::Negative);
    assert_eq!(check.lp_iterations, 0);
    assert!(check.objective < -1e-3);
    assert!(!oracle::feasibility_direct(&sys).unwrap());

    let pinv = linalg::pinv(sys.a_big(), tol).unwrap();
    assert_eq!(farkas_check(&sys, &pinv).unwrap().sign, HStarSign::Negative);
}

#[test]
fn singleton_x_always_holds() {
    // With one X symbol the only channel is the constant map and the
    // single column of C is forced to equal the Y marginal, so every
    // valid PMF passes through the unmodified pipeline.
    let mut rng = rand_seed(3);
    for _ in 0..10 {
        let p = oracle::random_pmf(&mut rng, 1, 3, 4);
        let verdict =
            check_simulatability(&p, Direction::YFixedZToX, &CheckOptions::default()).unwrap();
        assert!(verdict.holds);
    }
}

#[test]
fn direction_flag_matches_manual_swap() {
    let mut rng = rand_seed(42);
    for _ in 0..20 {
        let p = oracle::random_pmf(&mut rng, 3, 2, 3);
        let via_flag =
            check_simulatability(&p, Direction::XFixedZToY, &CheckOptions::default()).unwrap();
        let via_swap = check_simulatability(
            &p.swap_xy(),
            Direction::YFixedZToX,
            &CheckOptions::default(),
        )
        .unwrap();
        assert_eq!(via_flag.holds, via_swap.holds);
        assert_eq!(via_flag.rank_a, via_swap.rank_a);
    }
}

#[test]
fn consistency_fails_after_left_nullspace_perturbation() {
    // Adding a left-nullspace direction to the rhs bumps the augmented
    // rank without touching the coefficient rank.
    let sys = system_2x2x3();
    let dec = linalg::svd(sys.a_big()).unwrap();
    let tol = default_rank_tol(sys.m(), sys.n());
    let rank = linalg::rank_from_svd(&dec, tol);
    assert!(rank < sys.m(), "needs a nontrivial left nullspace");
    let null_dir = dec.u.col(rank);
    let c_perturbed: Vec<f64> = sys
        .c_vec()
        .iter()
        .zip(null_dir.iter())
        .map(|(c, u)| c + 0.1 * u)
        .collect();
    let aug = sys.a_big().augment_col(&c_perturbed);
    let rank_aug = linalg::numerical_rank(&aug, tol).unwrap();
    assert_eq!(rank_aug, rank + 1);
}

#[test]
fn consistency_holds_for_planted_rhs() {
    let mut rng = rand_seed(7);
    for _ in 0..10 {
        let (a, c) = oracle::random_simulatable_pair(&mut rng, 3, 3, 3);
        let sys = build_system(&a, &c).unwrap();
        let report = consistency(&sys, default_rank_tol(sys.m(), sys.n())).unwrap();
        assert!(report.consistent);
    }
}

#[test]
fn garbage_g_inverse_is_rejected() {
    let sys = system_2x2x3();
    let garbage = Matrix::from_fn(sys.n(), sys.m(), |i, j| (i + 2 * j) as f64 * 0.1);
    match farkas_check(&sys, &garbage) {
        Err(SimError::NotAGInverse { residual }) => assert!(residual > 1e-6),
        other => panic!("expected NotAGInverse, got {other:?}"),
    }
}

#[test]
fn sign_is_invariant_across_g_inverses_on_the_references() {
    let mut rng = rand_seed(13);
    for (a, c) in [
        {
            let p = fixtures::simulatable_2x2x3();
            (p.marginal_yz(), p.marginal_yx())
        },
        fixtures::nonsimulatable_pair_3y_4z_5x(),
    ] {
        let sys = build_system(&a, &c).unwrap();
        let tol = default_rank_tol(sys.m(), sys.n());
        let pinv = linalg::pinv(sys.a_big(), tol).unwrap();
        let baseline = farkas_check(&sys, &pinv).unwrap().sign;
        for _ in 0..5 {
            let w = Matrix::from_fn(sys.n(), sys.m(), |_, _| {
                use rand::Rng;
                rng.gen::<f64>() * 2.0 - 1.0
            });
            let variant = g_inverse_variant(sys.a_big(), &pinv, &w);
            let sign = farkas_check(&sys, &variant).unwrap().sign;
            assert_eq!(sign, baseline);
        }
    }
}

#[test]
fn early_termination_agrees_on_the_negative_reference() {
    let (a, c) = fixtures::nonsimulatable_pair_3y_4z_5x();
    let sys = build_system(&a, &c).unwrap();
    let p = check_simulatability_system_with_early(&sys);
    assert!(!p.holds);
    assert_eq!(p.reason, VerdictReason::NegativeHStar);
}

fn check_simulatability_system_with_early(
    sys: &LinearSystem,
) -> simcheck_core::simulatability::Verdict {
    let opts = CheckOptions {
        early_termination: true,
        ..CheckOptions::default()
    };
    simcheck_core::simulatability::check_system(sys, &opts).unwrap()
}

#[test]
fn certificates_of_reference_lp_instances_verify() {
    // The Farkas LP of the positive reference solves to zero; rebuild it
    // here through the public pieces and check the outcome's certificate.
    let sys = system_2x2x3();
    let problem = LpProblem::new(
        vec![0.0; sys.n()],
        sys.a_big().clone(),
        sys.c_vec().to_vec(),
    )
    .unwrap();
    let outcome = lp::solve(&problem).unwrap();
    assert!(lp::check_certificate(&problem, &outcome));
}

fn rand_seed(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}

#[test]
fn zero_probability_symbols_flow_through_the_pipeline() {
    // A Y symbol with no mass contributes all-zero rows to both marginals
    // and an always-erased Z symbol contributes a zero column to A; both
    // are retained rather than pruned, and the verdict must still agree
    // with the phase-1 oracle.
    let mut rng = rand_seed(29);
    for trial in 0..10 {
        let base = oracle::random_pmf(&mut rng, 2, 2, 2);
        // Embed into alphabets with a dead y symbol and a dead z symbol.
        let p = simcheck_core::pmf::JointPmf::from_fn(2, 3, 3, |x, y, z| {
            if y == 1 || z == 2 {
                0.0
            } else {
                base.prob(x, if y == 0 { 0 } else { 1 }, z)
            }
        })
        .unwrap();
        let verdict =
            check_simulatability(&p, Direction::YFixedZToX, &CheckOptions::default()).unwrap();
        let sys = build_system(&p.marginal_yz(), &p.marginal_yx()).unwrap();
        assert_eq!(sys.m(), 9);
        assert_eq!(sys.n(), 6);
        assert_eq!(
            verdict.holds,
            oracle::feasibility_direct(&sys).unwrap(),
            "trial {trial}"
        );
    }
}
