//! Summaries written by the CLI agree bit for bit with statistics recomputed
//! from the per-path trajectory files.

use std::path::Path;
use std::process::Command;

use rrate::experiment::{run_experiment, ExperimentConfig, PolicyKind};
use rrate_core::EnvSpec;

struct Row {
    theta: f64,
    t: f64,
    r: f64,
    cum_ratio: f64,
}

fn read_rows(path: &Path) -> Vec<Row> {
    let mut reader = csv::Reader::from_path(path).unwrap();
    assert_eq!(reader.headers().unwrap(), vec!["frame", "theta", "t", "r", "cum_ratio"]);
    reader
        .records()
        .map(|rec| {
            let rec = rec.unwrap();
            let f = |i: usize| rec[i].parse::<f64>().unwrap();
            Row { theta: f(1), t: f(2), r: f(3), cum_ratio: f(4) }
        })
        .collect()
}

fn read_table(path: &Path) -> Vec<Vec<String>> {
    let mut reader = csv::Reader::from_path(path).unwrap();
    reader.records().map(|r| r.unwrap().iter().map(str::to_string).collect()).collect()
}

fn mean(xs: &[f64]) -> f64 {
    let mut s = 0.0;
    for x in xs {
        s += x;
    }
    s / xs.len() as f64
}

fn se(xs: &[f64]) -> f64 {
    let m = mean(xs);
    let mut ss = 0.0;
    for x in xs {
        ss += (x - m) * (x - m);
    }
    (ss / (xs.len() - 1) as f64 / xs.len() as f64).sqrt()
}

fn f(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn summary_matches_trajectories() {
    let dir = tempfile::tempdir().unwrap();
    let (frames, paths) = (64usize, 12usize);
    let status = Command::new(env!("CARGO_BIN_EXE_rrate"))
        .args(["run", "--env", "systemB", "--q", "0.55", "--frames", "64", "--paths", "12", "--seed", "77"])
        .args(["--theta-min", "1", "--theta-max", "2", "--checkpoints", "1,5,17,40,64", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(status.status.success());
    let theta_star = 2.0 - (2.0 / 0.55) * ((1.55f64).sqrt() - 1.0);
    let pdir = dir.path().join("proposed");
    let trajectories: Vec<Vec<Row>> =
        (0..paths).map(|i| read_rows(&pdir.join(format!("trajectories/path_{i:05}.csv")))).collect();
    assert!(trajectories.iter().all(|t| t.len() == frames));

    let summary = read_table(&pdir.join("summary.csv"));
    let sums = read_table(&pdir.join("ratio_of_sums.csv"));
    assert_eq!(summary.len(), 5);
    for (row, sum_row) in summary.iter().zip(&sums) {
        let cp: usize = row[0].parse().unwrap();
        let (mut sr, mut st, mut ratios) = (Vec::new(), Vec::new(), Vec::new());
        for traj in &trajectories {
            let (mut r, mut t) = (0.0, 0.0);
            for x in &traj[..cp] {
                r += x.r;
                t += x.t;
            }
            assert_eq!(r / t, traj[cp - 1].cum_ratio);
            sr.push(r);
            st.push(t);
            ratios.push(r / t);
        }
        let gaps: Vec<f64> = ratios.iter().map(|x| (theta_star - x).abs()).collect();
        assert_eq!(f(&row[1]), mean(&ratios), "mean_ratio at {cp}");
        assert_eq!(f(&row[2]), mean(&gaps), "gap at {cp}");
        assert_eq!(f(&row[4]), se(&ratios), "stderr_ratio at {cp}");
        assert_eq!(row[6], paths.to_string());
        // theta after cp frames is the theta recorded on frame cp
        if cp < frames {
            let sq: Vec<f64> = trajectories.iter().map(|t| (t[cp].theta - theta_star).powi(2)).collect();
            assert_eq!(f(&row[3]), mean(&sq), "mse at {cp}");
            assert_eq!(f(&row[5]), se(&sq), "stderr_mse at {cp}");
        }
        let (mr, mt) = (mean(&sr), mean(&st));
        assert_eq!(f(&sum_row[1]), mr);
        assert_eq!(f(&sum_row[2]), mt);
        assert_eq!(f(&sum_row[3]), mr / mt);
        assert_eq!(f(&sum_row[4]), (theta_star - mr / mt).abs());
    }

    let finals = read_table(&dir.path().join("final_ratios.csv"));
    for (i, row) in finals.iter().enumerate() {
        assert_eq!(f(&row[1]), trajectories[i][frames - 1].cum_ratio);
    }
}

#[test]
fn worker_count_does_not_change_results() {
    let env = EnvSpec::project_selection(0.3, 8).unwrap();
    let mut cfg = ExperimentConfig::new(env, PolicyKind::ALL.to_vec(), 300, 40).with_bracket(0.0, 50.0).unwrap();
    cfg.keep_trajectories = 3;
    let runs: Vec<_> = [Some(1), Some(3), None]
        .into_iter()
        .map(|w| {
            cfg.workers = w;
            // Debug output compares NaN placeholders (policies without theta) as equal.
            format!("{:?}", run_experiment(&cfg).unwrap().runs)
        })
        .collect();
    assert!(runs[0] == runs[1], "1 vs 3 workers differ");
    assert!(runs[0] == runs[2], "1 worker vs default pool differ");
}

#[test]
fn policies_share_task_sequences() {
    // Fixed-theta at an unreachable theta always rejects; greedy never does.
    // Both see the same offers, so the offered-frame counts coincide.
    let env = EnvSpec::project_selection(0.9, 2).unwrap();
    let cfg = ExperimentConfig::new(env, vec![PolicyKind::Greedy, PolicyKind::ThetaEmpirical], 500, 10)
        .with_bracket(0.0, 50.0)
        .unwrap();
    let exp = run_experiment(&cfg).unwrap();
    assert_eq!(exp.runs[0].summary.offered, exp.runs[1].summary.offered);
}
