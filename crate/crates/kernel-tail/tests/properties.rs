//! Randomized property suites: structural invariants of the kernel pipeline
//! over each model family, closed-form cross-checks, fit-window stability,
//! and report determinism.

mod common;

use kernel_tail::fluid::{
    build_fluid_kernel, fluid_branch_points, fluid_branches, fluid_classify, mm1_alpha_star,
};
use kernel_tail::kernel::{branch_points, build_kernel};
use kernel_tail::model::{
    classify_walk, fluid_stability, walk_stability, FluidSpec, Model, SrbmSpec, Stability,
    WalkSpec,
};
use kernel_tail::oracle::{boundary_sequence, fit_tail, solve_truncated};
use kernel_tail::report::{analyze, AnalysisOptions};
use kernel_tail::singularity::pole_candidates;
use kernel_tail::srbm::{
    build_srbm_kernel, independent_component_rate, srbm_branch_eval, srbm_classify,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Normalized two-demand rates with `lambda < min(mu1, mu2)` by
/// construction, so the walk is stable.
fn two_demand_rates() -> impl Strategy<Value = (f64, f64, f64)> {
    (0.05f64..0.28, 0.3f64..1.0, 0.3f64..1.0).prop_map(|(a, b, c)| {
        let s = a + b + c;
        (a / s, b / s, c / s)
    })
}

proptest! {
    /// The full discrete pipeline on random stable two-demand instances:
    /// branch ordering, Vieta identities, kernel residuals, candidate
    /// minimality of the dominant singularity, and classification
    /// stability under floating-point-scale perturbations.
    #[test]
    fn prop_two_demand_pipeline((lambda, mu1, mu2) in two_demand_rates()) {
        let spec = WalkSpec::two_demand(lambda, mu1, mu2);
        let stab = walk_stability(&spec);
        prop_assume!(matches!(&stab, Ok(v) if v.status == Stability::Stable));

        let ks = build_kernel(&spec).expect("kernel");
        let bp = branch_points(&ks).expect("branch points");
        common::check_branch_ordering(&bp).map_err(TestCaseError::fail)?;
        common::check_vieta(&ks, &bp).map_err(TestCaseError::fail)?;
        common::check_kernel_residual(&ks, &bp).map_err(TestCaseError::fail)?;

        let class = classify_walk(&spec);
        prop_assert!(class.nonsingular);
        prop_assert_eq!(class.genus, 1);
        let pc = pole_candidates(&ks, &bp, &class).expect("pole candidates");
        let label = kernel_tail::singularity::classify(&pc);
        prop_assert!((1..=4).contains(&label.case_id));
        prop_assert!(label.x_dom > 1.0);

        // The dominant singularity is the smallest candidate.
        let min_candidate = pc.x_star.min(pc.x_tilde1).min(pc.x3);
        prop_assert!(
            (label.x_dom - min_candidate).abs() <= 1e-6 * label.x_dom,
            "x_dom {} is not the smallest candidate {}",
            label.x_dom,
            min_candidate
        );

        let mut rng = ChaCha8Rng::seed_from_u64(pc.x3.to_bits() ^ pc.x_star.to_bits());
        common::check_classifier_determinism(&pc, &mut rng).map_err(TestCaseError::fail)?;
    }
}

proptest! {
    /// Fluid kernels: closed-form branch points, Vieta product of the
    /// z-roots, and the inverse relation between `alpha_of_z` and the
    /// branch solutions.
    #[test]
    fn prop_fluid_kernel_identities(
        lambda in 0.2f64..3.0,
        mu in 0.5f64..6.0,
        c in 1u32..=4,
        r in 0.1f64..4.0,
    ) {
        let spec = FluidSpec { lambda, mu, c, r };
        prop_assume!(matches!(
            fluid_stability(&spec).map(|v| v.status),
            Ok(Stability::Stable)
        ));
        let fk = build_fluid_kernel(&spec);

        let (a1, a2) = fluid_branch_points(&fk);
        let cmu = c as f64 * mu;
        let lo = (cmu.sqrt() - lambda.sqrt()).powi(2) / r;
        let hi = (cmu.sqrt() + lambda.sqrt()).powi(2) / r;
        prop_assert!((a1 - lo).abs() <= 1e-12 * (1.0 + lo));
        prop_assert!((a2 - hi).abs() <= 1e-12 * (1.0 + hi));

        let h_scale = lambda * (cmu / lambda).powi(2) + lambda + 2.0 * cmu;
        for frac in [0.3, 0.7] {
            let alpha = a1 * frac;
            let (z0, z1) = fluid_branches(&fk, alpha).expect("real branches below alpha1");
            prop_assert!(
                (z0 * z1 - cmu / lambda).abs() <= 1e-10 * (1.0 + cmu / lambda),
                "Vieta product {} != c mu / lambda = {}",
                z0 * z1,
                cmu / lambda
            );
            for z in [z0, z1] {
                prop_assert!(fk.h(alpha, z).abs() <= 1e-9 * h_scale);
            }
        }

        // alpha_of_z inverts the branch map on the physical interval.
        let z_dom = cmu / lambda;
        for frac in [0.3, 0.7] {
            let z = 1.0 + frac * (z_dom - 1.0);
            let alpha = fk.alpha_of_z(z);
            prop_assert!(fk.h(alpha, z).abs() <= 1e-9 * h_scale);
            if alpha > 1e-9 && alpha < a1 * (1.0 - 1e-9) {
                let (z0, z1) = fluid_branches(&fk, alpha).expect("branches");
                let dist = (z0 - z).abs().min((z1 - z).abs());
                prop_assert!(
                    dist <= 1e-8 * z,
                    "alpha_of_z({z}) = {alpha} does not invert: branches ({z0}, {z1})"
                );
            }
        }
    }
}

proptest! {
    /// Single-server fluid queues: the explicit pole formula holds exactly
    /// when the candidate sits on the principal branch, and the branch
    /// point takes over when it does not.
    #[test]
    fn prop_fluid_single_server_pole(
        lambda in 0.2f64..2.0,
        mu in 0.5f64..6.0,
        r in 0.1f64..4.0,
    ) {
        let spec = FluidSpec { lambda, mu, c: 1, r };
        prop_assume!(matches!(
            fluid_stability(&spec).map(|v| v.status),
            Ok(Stability::Stable)
        ));
        // Keep clear of the sheet-crossing manifold, where the formula
        // zero and the branch point meet tangentially and the gap between
        // them is quadratically small in the distance to the manifold.
        let fill = lambda * (r + 1.0) * (r + 1.0);
        prop_assume!((fill - mu).abs() > 1e-3 * mu);

        let fk = build_fluid_kernel(&spec);
        let sing = fluid_classify(&fk).expect("classification");
        match mm1_alpha_star(&fk) {
            Some(formula) => {
                prop_assert!(sing.alpha_star.is_finite());
                prop_assert!(
                    (sing.alpha_star - formula).abs() <= 1e-10 * (1.0 + formula),
                    "searched pole {} vs formula {}",
                    sing.alpha_star,
                    formula
                );
                prop_assert!(fill > mu);
            }
            None => {
                // Stable but off the principal branch: the branch point
                // alone is the dominant singularity.
                prop_assert!(fill < mu);
                prop_assert!(sing.alpha_star.is_infinite());
                prop_assert_eq!(sing.case_id, 3);
                prop_assert!((sing.alpha_dom - sing.alpha1).abs() <= 1e-12 * sing.alpha1);
            }
        }
    }
}

/// Sweeping `r` across the sheet-crossing threshold `sqrt(mu/lambda) - 1`
/// moves the single-server queue from branch-point domination through the
/// coincident configuration to a strict interior pole.
#[test]
fn test_fluid_sheet_crossover_scan() {
    let (lambda, mu) = (1.0, 4.0);
    let expectations = [
        (0.5, 3u8),
        (0.9, 3),
        (1.0, 2),
        (1.5, 1),
        (2.5, 1),
    ];
    for (r, case) in expectations {
        let fk = build_fluid_kernel(&FluidSpec { lambda, mu, c: 1, r });
        let sing = fluid_classify(&fk).expect("classification");
        assert_eq!(
            sing.case_id, case,
            "r = {r}: expected case {case}, got {} (alpha_star {}, alpha1 {})",
            sing.case_id, sing.alpha_star, sing.alpha1
        );
        match case {
            1 => {
                let formula = mu / (r + 1.0) - lambda;
                assert!((sing.alpha_dom - formula).abs() <= 1e-10 * (1.0 + formula));
            }
            _ => {
                assert!((sing.alpha_dom - sing.alpha1).abs() <= 1e-12 * sing.alpha1);
            }
        }
    }

    // The sign of alpha_star - alpha1 (absent pole counting as positive)
    // flips exactly once along the sweep.
    let mut signs = Vec::new();
    let mut r = 0.3;
    while r < 2.95 {
        let fk = build_fluid_kernel(&FluidSpec { lambda, mu, c: 1, r });
        let sing = fluid_classify(&fk).expect("classification");
        let sign = if sing.alpha_star.is_infinite() {
            1
        } else if (sing.alpha_star - sing.alpha1).abs() <= 1e-9 * sing.alpha1 {
            0
        } else if sing.alpha_star > sing.alpha1 {
            1
        } else {
            -1
        };
        signs.push(sign);
        r += 0.2;
    }
    assert!(signs.windows(2).all(|w| w[0] >= w[1]), "sign sequence not monotone: {signs:?}");
    assert!(signs.contains(&1) && signs.contains(&-1), "sweep missed the crossing: {signs:?}");
}

proptest! {
    /// Diagonal SRBM data decouple: the face-1 pole candidate is the
    /// exponential marginal rate `2 |mu1| / Sigma11`, and the dominant
    /// singularity is the smaller of that rate and the branch point.
    #[test]
    fn prop_srbm_diagonal_components(
        mu1 in -3.0f64..-0.1,
        mu2 in -3.0f64..-0.1,
        s11 in 0.3f64..3.0,
        s22 in 0.3f64..3.0,
    ) {
        let spec = SrbmSpec {
            mu: [mu1, mu2],
            sigma: [[s11, 0.0], [0.0, s22]],
            refl: [[1.0, 0.0], [0.0, 1.0]],
        };
        let sk = build_srbm_kernel(&spec).expect("kernel");
        let ss = srbm_classify(&sk).expect("classification");

        // Branch points of the x-quadratic discriminant, in closed form.
        let x2 = (-mu1 + (mu1 * mu1 + s11 * mu2 * mu2 / s22).sqrt()) / s11;
        prop_assert!((ss.x2 - x2).abs() <= 1e-9 * (1.0 + x2));
        prop_assert!(ss.x1 < 0.0 && 0.0 < ss.x2);

        // Both y-branches annihilate the kernel form in the interior.
        let xm = (ss.x1 + ss.x2) / 2.0;
        let (y0, y1) = srbm_branch_eval(&sk, xm).expect("real branches");
        let scale = 1.0 + s11 + s22 + mu1.abs() + mu2.abs();
        for y in [y0, y1] {
            prop_assert!(sk.gamma(xm, y).abs() <= 1e-9 * scale * (1.0 + y * y + xm * xm));
        }

        let rate = independent_component_rate(&sk).expect("diagonal data decouple");
        prop_assert!((rate - 2.0 * mu1.abs() / s11).abs() <= 1e-12 * rate);

        // Away from the coincidence manifold the classification is the
        // two-way minimum.
        if rate < ss.x2 * (1.0 - 1e-6) {
            prop_assert_eq!(ss.case_id, 1);
            prop_assert!(
                (ss.tau1 - rate).abs() <= 1e-8 * (1.0 + rate),
                "tau1 {} vs marginal rate {}",
                ss.tau1,
                rate
            );
        } else if rate > ss.x2 * (1.0 + 1e-6) {
            prop_assert_eq!(ss.case_id, 3);
            prop_assert!((ss.tau1 - ss.x2).abs() <= 1e-9 * (1.0 + ss.x2));
        }
        prop_assert!(ss.tau1 > 0.0);
        prop_assert!(ss.tau1 <= ss.x2 * (1.0 + 1e-12));
    }
}

proptest! {
    /// Correlated SRBM data keep the structural invariants: one negative
    /// and one positive branch point, kernel-annihilating branches, and a
    /// positive dominant decay rate bounded by the branch point.
    #[test]
    fn prop_srbm_correlated_structure(
        mu1 in -3.0f64..-0.1,
        mu2 in -3.0f64..-0.1,
        s11 in 0.3f64..3.0,
        s22 in 0.3f64..3.0,
        rho in -0.85f64..0.85,
    ) {
        let s12 = rho * (s11 * s22).sqrt();
        let spec = SrbmSpec {
            mu: [mu1, mu2],
            sigma: [[s11, s12], [s12, s22]],
            refl: [[1.0, 0.0], [0.0, 1.0]],
        };
        let sk = build_srbm_kernel(&spec).expect("kernel");
        let ss = srbm_classify(&sk).expect("classification");
        prop_assert!(ss.x1 < 0.0 && 0.0 < ss.x2);
        prop_assert!((1..=4).contains(&ss.case_id));
        prop_assert!(ss.tau1 > 0.0);
        prop_assert!(ss.tau1 <= ss.x2 * (1.0 + 1e-12));
        if rho != 0.0 {
            prop_assert!(independent_component_rate(&sk).is_none());
        }

        let xm = (ss.x1 + ss.x2) / 2.0;
        let (y0, y1) = srbm_branch_eval(&sk, xm).expect("real branches");
        let scale = 1.0 + s11 + s22 + mu1.abs() + mu2.abs();
        for y in [y0, y1] {
            prop_assert!(sk.gamma(xm, y).abs() <= 1e-9 * scale * (1.0 + y * y + xm * xm));
        }
    }
}

proptest! {
    /// The exact-elimination rate estimator and the log-space least squares
    /// recover pure `c * n^alpha * theta^n` sequences to floating-point
    /// accuracy.
    #[test]
    fn prop_fit_recovers_synthetic_tails(
        theta in 0.3f64..0.9,
        alpha_idx in 0usize..3,
        c in 0.05f64..5.0,
    ) {
        let alpha = [0.0, -0.5, -1.5][alpha_idx];
        let seq: Vec<f64> = (1..=300)
            .map(|n| c * (n as f64).powf(alpha) * theta.powi(n))
            .collect();
        let fit = fit_tail(&seq, Some((60, 260))).expect("fit");
        prop_assert!((fit.theta_hat - theta).abs() <= 1e-9 * theta);
        prop_assert!((fit.alpha_hat - alpha).abs() <= 1e-6);
        prop_assert!((fit.c_hat - c).abs() <= 1e-6 * c);
        prop_assert!(fit.window_sensitivity.0 <= 1e-3);
        prop_assert!(fit.window_sensitivity.1 <= 0.15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]
    /// Rendering an analysis twice yields byte-identical reports.
    #[test]
    fn prop_report_determinism((lambda, mu1, mu2) in two_demand_rates()) {
        prop_assume!(matches!(
            walk_stability(&WalkSpec::two_demand(lambda, mu1, mu2)).map(|v| v.status),
            Ok(Stability::Stable)
        ));
        let model = Model::Walk(WalkSpec::two_demand(lambda, mu1, mu2));
        let opts = AnalysisOptions::default();
        let first = analyze(&model, &opts).expect("analysis").to_json_string();
        let second = analyze(&model, &opts).expect("analysis").to_json_string();
        prop_assert_eq!(first, second);
    }
}

/// Disjoint fit windows agree on the rate and the exponent for an
/// oracle-solved boundary sequence, and the advertised window sensitivity
/// stays within the acceptance thresholds.
#[test]
fn test_fit_windows_agree_on_solved_sequence() {
    let spec = WalkSpec::two_demand(0.2, 0.3, 0.5);
    let ts = solve_truncated(&spec, 200).expect("truncated solve");
    let seq = boundary_sequence(&ts);

    let full = fit_tail(&seq, None).expect("default-window fit");
    assert!(full.window_sensitivity.0 <= 1e-3);
    assert!(full.window_sensitivity.1 <= 0.15);

    let left = fit_tail(&seq, Some((40, 95))).expect("left-window fit");
    let right = fit_tail(&seq, Some((105, 160))).expect("right-window fit");
    assert!(
        (left.theta_hat - right.theta_hat).abs() <= 1e-3,
        "disjoint windows disagree on theta: {} vs {}",
        left.theta_hat,
        right.theta_hat
    );
    assert!(
        (left.alpha_hat - right.alpha_hat).abs() <= 0.15,
        "disjoint windows disagree on alpha: {} vs {}",
        left.alpha_hat,
        right.alpha_hat
    );
}
