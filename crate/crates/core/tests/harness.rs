//! End-to-end runs of the Monte Carlo driver.

use std::io::Write;

use otfs_sbl::estimators::Method;
use otfs_sbl::harness::{
    emit_csv, read_csv, summaries_to_rows, sweep, write_csv, Harness, RunConfig, SweepPoint,
    CSV_HEADER,
};

fn quick(trials: usize) -> RunConfig {
    RunConfig {
        estimators: vec![Method::GmmSbl, Method::Sbl, Method::Omp, Method::OracleMmse],
        snapshots: vec![4],
        snr_db: vec![0.0, 20.0],
        trials,
        em_iters: 40,
        ..RunConfig::default()
    }
}

fn csv_bytes(cfg: &RunConfig) -> Vec<u8> {
    let mut out = Vec::new();
    write_csv(&sweep(cfg).unwrap(), &mut out).unwrap();
    out
}

#[test]
fn worker_count_does_not_change_the_csv() {
    let one = csv_bytes(&RunConfig {
        workers: 1,
        ..quick(4)
    });
    let two = csv_bytes(&RunConfig {
        workers: 2,
        ..quick(4)
    });
    let four = csv_bytes(&RunConfig {
        workers: 4,
        ..quick(4)
    });
    assert_eq!(one, two);
    assert_eq!(one, four);
}

#[test]
fn csv_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rows.csv");
    let rows = sweep(&quick(2)).unwrap();
    emit_csv(&rows, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.ends_with('\n'));
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER.join(","));
    assert_eq!(text.lines().count(), rows.len() + 1);
    assert_eq!(read_csv(&path).unwrap(), rows);

    let empty = dir.path().join("empty.csv");
    emit_csv(&[], &empty).unwrap();
    assert_eq!(
        std::fs::read_to_string(&empty).unwrap(),
        format!("{}\n", CSV_HEADER.join(","))
    );
}

#[test]
fn rows_are_consistent() {
    let cfg = RunConfig {
        k_model: vec![1, 2],
        ..quick(3)
    };
    let rows = sweep(&cfg).unwrap();
    // 2 SNRs × (2 mixture orders + sbl + omp + oracle)
    assert_eq!(rows.len(), 10);
    for r in &rows {
        assert!(r.nmse >= 0.0);
        assert!((r.nmse_db - 10.0 * r.nmse.log10()).abs() < 1e-9);
        let ser = r.ser.expect("detection is on by default");
        assert!((0.0..=1.0).contains(&ser));
        assert_eq!((r.trials, r.seed, r.elapsed_ms), (3, 1, 0));
    }
    let labels: Vec<&str> = rows[..5].iter().map(|r| r.estimator.as_str()).collect();
    assert_eq!(
        labels,
        ["gmm_sbl_k1", "gmm_sbl_k2", "sbl", "omp", "oracle_mmse"]
    );
}

#[test]
fn emitting_to_a_missing_directory_fails() {
    let dir = tempfile::tempdir().unwrap();
    let err = emit_csv(&[], &dir.path().join("missing").join("rows.csv")).unwrap_err();
    assert_eq!(err.kind(), "io");
}

#[test]
fn config_file_grammar() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(
        file,
        "# study\nsnr_db = -5, 0, 5  # three points\n\nestimators = omp, oracle_mmse\ntrials = 7"
    )
    .unwrap();
    let cfg = RunConfig::from_file(file.path()).unwrap();
    assert_eq!(cfg.snr_db, [-5.0, 0.0, 5.0]);
    assert_eq!(cfg.estimators, [Method::Omp, Method::OracleMmse]);
    assert_eq!(cfg.trials, 7);

    let err = RunConfig::parse("trials = 3\n\nbogus = 1").unwrap_err();
    assert!(err.to_string().contains("line 3"), "{err}");
    let err = RunConfig::parse("snr_db = 0, x").unwrap_err();
    assert!(err.to_string().contains("line 1"), "{err}");
}

#[test]
fn near_noiseless_recovery() {
    let cfg = RunConfig {
        estimators: vec![Method::GmmSbl, Method::Sbl, Method::Omp, Method::OracleMmse],
        paths: 1,
        snr_db: vec![80.0],
        trials: 3,
        ser: false,
        ..RunConfig::default()
    };
    for row in sweep(&cfg).unwrap() {
        assert!(row.nmse_db < -30.0, "{}: {} dB", row.estimator, row.nmse_db);
    }
}

#[test]
fn oracle_leads_on_average() {
    let cfg = RunConfig {
        snr_db: vec![10.0],
        ser: false,
        ..quick(6)
    };
    let rows = sweep(&cfg).unwrap();
    let oracle = rows
        .iter()
        .find(|r| r.estimator == "oracle_mmse")
        .unwrap()
        .nmse;
    for r in &rows {
        assert!(oracle <= r.nmse, "{} at {}", r.estimator, r.nmse);
    }
}

#[test]
fn every_channel_mode_runs() {
    for (mode, frac) in [("case:C", false), ("profile", false), ("mixture", true)] {
        let mut cfg = RunConfig {
            estimators: vec![Method::Omp, Method::OracleMmse],
            trials: 2,
            ..RunConfig::default()
        };
        cfg.set("channel", mode).unwrap();
        cfg.frac_doppler = frac;
        let harness = Harness::new(cfg.clone()).unwrap();
        let summaries = harness.sweep_detailed().unwrap();
        let rows = summaries_to_rows(&summaries, cfg.seed);
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].scenario.ends_with("-frac"), frac);
        assert!(rows.iter().all(|r| r.nmse.is_finite()));
    }
}

#[test]
fn snapshots_of_one_trial_share_the_support() {
    let harness = Harness::new(RunConfig {
        trials: 1,
        ..RunConfig::default()
    })
    .unwrap();
    let point = SweepPoint {
        pilot_len: 80,
        snapshots: 6,
        snr_db: 0.0,
    };
    let data = harness.trial_data(&point, 0).unwrap();
    assert_eq!(data.supports.len(), 1);
    for paths in &data.paths {
        let delays: Vec<usize> = paths.iter().map(|p| p.delay).collect();
        assert_eq!(delays, data.supports[0].delays);
    }
    assert_ne!(data.paths[0][0].gain, data.paths[1][0].gain);
}
