//! Statistical behaviour of the policies against independently derived
//! targets. Every tolerance is either exact or four standard errors.

use rrate::experiment::{run_experiment, simulate_path, ExperimentConfig, PolicyKind};
use rrate::goldens;
use rrate::report::{check_bounds, STAT_SLACK_SE};
use rrate_core::stats::RunningStats;
use rrate_core::{best_response, EnvSpec, Environment, Policy};

#[test]
fn fixed_theta_star_achieves_theta_star() {
    let env = EnvSpec::two_choice(0.25, 31).unwrap();
    let out = simulate_path(env, 0, Policy::FixedTheta(2.5), 1_000_000, &[], 1, false).unwrap();
    assert!((out.final_ratio - 2.5).abs() < 5e-3, "{}", out.final_ratio);
}

#[test]
fn greedy_is_suboptimal_on_two_choice() {
    // Greedy always takes the high-quality option: 3 / (1 + p) = 2.4 at p = 1/4,
    // while theta* = 3 - 2p = 2.5.
    let env = EnvSpec::two_choice(0.25, 32).unwrap();
    let cfg = ExperimentConfig::new(env, vec![PolicyKind::Proposed, PolicyKind::Greedy], 100_000, 1)
        .with_bracket(1.0, 3.0)
        .unwrap();
    let exp = run_experiment(&cfg).unwrap();
    let proposed = exp.runs[0].summary.final_ratios[0];
    let greedy = exp.runs[1].summary.final_ratios[0];
    assert!((greedy - 2.4).abs() < 0.01, "{greedy}");
    assert!(proposed - greedy >= 0.05, "proposed {proposed} greedy {greedy}");
}

#[test]
fn innovation_has_zero_mean_at_theta_star() {
    let golden = goldens::project_selection(&rrate_core::SystemKind::ProjectSelection { p: 0.6 }).unwrap();
    let cases = [
        (EnvSpec::two_choice(0.25, 40).unwrap(), 2.5, 0.0),
        (EnvSpec::flexible_curve(0.7, 40).unwrap(), 2.0 - (2.0 / 0.7) * (1.7f64.sqrt() - 1.0), 0.0),
        (EnvSpec::project_selection(0.6, 40).unwrap(), golden.theta_star, golden.std_error),
    ];
    for (env, theta, theta_se) in cases {
        let mut stats = RunningStats::new();
        let mut mean_t = RunningStats::new();
        for frame in Environment::substream(env, 99).take(200_000) {
            let br = best_response(&frame.set, theta).unwrap();
            stats.push(br.value);
            mean_t.push(br.decision.t);
        }
        // uncertainty of a golden theta* shifts M by about E[T] * se(theta*)
        let slack = STAT_SLACK_SE * (stats.std_error() + mean_t.mean() * theta_se);
        assert!(stats.mean().abs() <= slack, "{:?}: mean innovation {} > {slack}", env.kind, stats.mean());
    }
}

#[test]
fn mean_ratio_never_exceeds_theta_star() {
    let cases = [
        (EnvSpec::two_choice(0.25, 50).unwrap(), (1.0, 3.0)),
        (EnvSpec::two_choice(0.7, 50).unwrap(), (1.0, 3.0)),
        (EnvSpec::flexible_curve(0.7, 50).unwrap(), (1.0, 2.0)),
        (EnvSpec::project_selection(0.3, 50).unwrap(), (0.0, 50.0)),
    ];
    for (env, (lo, hi)) in cases {
        let cfg = ExperimentConfig::new(env, PolicyKind::ALL.to_vec(), 2000, 300).with_bracket(lo, hi).unwrap();
        let exp = run_experiment(&cfg).unwrap();
        let theta_se = exp.theta_star.std_error.unwrap_or(0.0);
        for run in &exp.runs {
            for c in &run.summary.checkpoints {
                let limit = exp.theta_star.value + STAT_SLACK_SE * (c.stderr_ratio + theta_se);
                assert!(c.mean_ratio <= limit, "{:?} {} k={}: {} > {limit}", env.kind, run.summary.policy, c.checkpoint, c.mean_ratio);
            }
        }
    }
}

#[test]
fn single_path_flexible_curve_converges() {
    let env = EnvSpec::flexible_curve(0.7, 60).unwrap();
    let cfg = ExperimentConfig::new(env, vec![PolicyKind::Proposed], 1000, 1).with_bracket(1.0, 2.0).unwrap();
    let exp = run_experiment(&cfg).unwrap();
    let ratio = exp.runs[0].summary.final_ratios[0];
    assert!((ratio - 1.131884).abs() < 0.05, "{ratio}");
}

#[test]
fn bounds_hold_on_small_runs() {
    for (env, (lo, hi)) in [
        (EnvSpec::two_choice(0.25, 70).unwrap(), (1.0, 3.0)),
        (EnvSpec::flexible_curve(0.7, 70).unwrap(), (1.0, 2.0)),
        (EnvSpec::flexible_curve(0.25, 70).unwrap(), (1.0, 2.0)),
        (EnvSpec::project_selection(0.6, 70).unwrap(), (0.0, 50.0)),
    ] {
        let cfg = ExperimentConfig::new(env, vec![PolicyKind::Proposed], 1000, 200).with_bracket(lo, hi).unwrap();
        let exp = run_experiment(&cfg).unwrap();
        let report = check_bounds(&env, exp.bracket, &exp.runs[0].summary).unwrap();
        let expected_kinds = if matches!(env.kind, rrate_core::SystemKind::FlexibleCurve { .. }) { 3 } else { 2 };
        let kinds: std::collections::HashSet<_> = report.rows.iter().map(|r| r.kind.name()).collect();
        assert_eq!(kinds.len(), expected_kinds);
        assert!(report.all_hold(), "{:?}: {:?}", env.kind, report.violations().collect::<Vec<_>>());
    }
}

#[test]
fn single_frame_run_reports_only_the_mse_bound() {
    let env = EnvSpec::two_choice(0.25, 71).unwrap();
    let cfg = ExperimentConfig::new(env, vec![PolicyKind::Proposed], 1, 10).with_bracket(1.0, 3.0).unwrap();
    let exp = run_experiment(&cfg).unwrap();
    let report = check_bounds(&env, exp.bracket, &exp.runs[0].summary).unwrap();
    assert_eq!(report.rows.len(), 1);
    assert_eq!(report.rows[0].kind.name(), "mse_lemma");
    assert_eq!(report.rows[0].checkpoint, 1);
}

#[test]
fn project_selection_rejection_rate() {
    // reference 0.33 at p = 0.6; 1000 paths keeps the test quick
    let env = EnvSpec::project_selection(0.6, 80).unwrap();
    let cfg = ExperimentConfig::new(env, vec![PolicyKind::Proposed], 2000, 1000).with_bracket(0.0, 50.0).unwrap();
    let exp = run_experiment(&cfg).unwrap();
    let rate = exp.runs[0].summary.rejection_rate.unwrap();
    assert!((rate - 0.33).abs() <= 0.03, "{rate}");
}

#[test]
fn identical_configs_give_identical_summaries() {
    let env = EnvSpec::flexible_curve(0.4, 90).unwrap();
    let cfg = ExperimentConfig::new(env, vec![PolicyKind::Proposed, PolicyKind::FixedTheta], 100, 2);
    assert_eq!(run_experiment(&cfg).unwrap(), run_experiment(&cfg).unwrap());
}
