use ldpc_workbench::harness::{
    read_results, run_sweep, run_trial_with, trial_rng, write_csv, write_results, AlgoSpec, StoppingRule, SweepSpec,
    CSV_HEADER,
};
use ldpc_workbench::{Algorithm, Decoder, DecoderConfig, ParityCheckCode, TANNER_155_ALIST};

fn tanner() -> ParityCheckCode {
    ParityCheckCode::from_alist(TANNER_155_ALIST).unwrap()
}

fn spec() -> SweepSpec {
    let mut s = SweepSpec::new(
        "tanner155",
        vec![AlgoSpec::of(Algorithm::Ms), AlgoSpec::of(Algorithm::Irrwbf)],
        vec![1.0, 2.5],
    );
    s.base_seed = 42;
    s.instrument = true;
    s.stopping = StoppingRule::TargetErrors {
        frame_errors: 25,
        min_trials: 50,
        max_trials: 3000,
    };
    s
}

#[test]
fn worker_count_does_not_change_results() {
    let code = tanner();
    let one = run_sweep(&code, &spec(), 1).unwrap();
    let four = run_sweep(&code, &spec(), 4).unwrap();
    assert_eq!(one.to_json(), four.to_json());
}

#[test]
fn seed_changes_results() {
    let code = tanner();
    let mut s = spec();
    let a = run_sweep(&code, &s, 1).unwrap();
    s.base_seed = 43;
    let b = run_sweep(&code, &s, 1).unwrap();
    assert_ne!(a.cells, b.cells);
    assert_ne!(a.metadata.spec_sha256, b.metadata.spec_sha256);
}

#[test]
fn paired_mode_shares_noise() {
    let code = tanner();
    let mut s = SweepSpec::new(
        "tanner155",
        vec![
            AlgoSpec::of(Algorithm::Ms),
            AlgoSpec {
                label: "ms-copy".into(),
                config: DecoderConfig::new(Algorithm::Ms),
            },
        ],
        vec![2.0],
    );
    s.stopping = StoppingRule::FixedTrials { trials: 300 };
    s.paired = true;
    let r = run_sweep(&code, &s, 1).unwrap();
    assert_eq!(r.cells[0].stats, r.cells[1].stats);
    s.paired = false;
    let r = run_sweep(&code, &s, 1).unwrap();
    assert_ne!(r.cells[0].stats, r.cells[1].stats);
}

#[test]
fn cells_sum_their_trials() {
    let code = tanner();
    let mut s = spec();
    s.stopping = StoppingRule::FixedTrials { trials: 200 };
    s.paired = true;
    let r = run_sweep(&code, &s, 2).unwrap();
    let sigma = r.cells[0].sigma;
    let mut dec = Decoder::new(&code, &DecoderConfig::new(Algorithm::Ms)).unwrap();
    let (mut bits, mut frames, mut iters) = (0, 0, 0);
    for t in 0..200 {
        let rec = run_trial_with(&code, &mut dec, sigma, &mut trial_rng(42, 0, u64::MAX, t)).unwrap();
        bits += rec.bit_errors;
        frames += u64::from(rec.frame_error());
        iters += rec.iterations;
    }
    let c = &r.cells[0];
    assert_eq!((c.stats.bit_errors, c.stats.frame_errors, c.stats.total_iterations), (bits, frames, iters));
    assert_eq!(c.ber, bits as f64 / (200.0 * 155.0));
    assert_eq!(c.mean_iters, iters as f64 / 200.0);
}

#[test]
fn results_and_csv_on_disk() {
    let code = tanner();
    let r = run_sweep(&code, &spec(), 0).unwrap();
    assert_eq!(r.metadata.n_vars, 155);
    assert_eq!(r.metadata.base_seed, 42);
    assert_eq!(r.metadata.noise, ldpc_workbench::channel::GAUSSIAN_METHOD);
    assert!(r.cells.iter().all(|c| c.stats.ops_total.is_some()));

    let dir = std::env::temp_dir().join(format!("ldpcwb-harness-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let json = dir.join("r.json");
    write_results(&r, &json).unwrap();
    assert_eq!(read_results(&json).unwrap(), r);

    let csv = dir.join("r.csv");
    write_csv(&r, &csv).unwrap();
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next(), Some(CSV_HEADER));
    assert_eq!(text.lines().count(), 1 + r.cells.len());
    std::fs::remove_dir_all(&dir).unwrap();
}
