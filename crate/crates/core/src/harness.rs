//! Monte-Carlo error-rate experiments.
//!
//! Every trial sends the all-zero codeword (all `+1` symbols) through AWGN and
//! decodes it, so a bit error is any decoded 1. Each trial draws its noise from
//! a ChaCha8 stream keyed by `(base_seed, snr index, stream, trial index)`,
//! where the stream is the algorithm index, or a shared constant in paired
//! mode so all algorithms see identical noise. Cell statistics are integer
//! sums, and trials are folded in index order, so results do not depend on
//! how many worker threads ran them.

use std::fs;
use std::io::Write;
use std::path::Path;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::channel::{self, ChannelError, LlrBlock};
use crate::code::ParityCheckCode;
use crate::decoder::{Algorithm, DecodeError, Decoder, DecoderConfig};
use crate::metrics::{IterationProfile, OpCounters};

/// Version of the JSON result layout.
pub const SCHEMA_VERSION: u32 = 1;
/// Header of the CSV export.
pub const CSV_HEADER: &str = "algo,snr_db,frames,bit_errors,frame_errors,ber,fer,mean_iters";

const PAIRED_STREAM: u64 = u64::MAX;
const BATCH: u64 = 2048;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid sweep: {0}")]
    InvalidSpec(String),
    #[error("{algo} at {snr_db} dB, trial {trial}: {source}")]
    Trial {
        algo: String,
        snr_db: f64,
        trial: u64,
        source: DecodeError,
    },
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error("unsupported result schema version {found} (expected {expected})")]
    SchemaVersion { found: u64, expected: u32 },
    #[error("result file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One algorithm entry of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgoSpec {
    /// Name used in results, curves and cost models.
    pub label: String,
    pub config: DecoderConfig,
}

impl AlgoSpec {
    pub fn new(config: DecoderConfig) -> Self {
        AlgoSpec {
            label: config.algorithm.name().to_string(),
            config,
        }
    }

    pub fn of(algorithm: Algorithm) -> Self {
        Self::new(DecoderConfig::new(algorithm))
    }
}

/// When a cell stops collecting frames.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum StoppingRule {
    /// Exactly this many frames.
    FixedTrials { trials: u64 },
    /// Stop once `frame_errors` errors are seen (after at least `min_trials`
    /// frames) or at `max_trials` frames.
    TargetErrors {
        frame_errors: u64,
        min_trials: u64,
        max_trials: u64,
    },
}

impl Default for StoppingRule {
    fn default() -> Self {
        StoppingRule::TargetErrors {
            frame_errors: 100,
            min_trials: 1,
            max_trials: 100_000,
        }
    }
}

impl StoppingRule {
    fn max_trials(&self) -> u64 {
        match *self {
            StoppingRule::FixedTrials { trials } => trials,
            StoppingRule::TargetErrors { max_trials, .. } => max_trials,
        }
    }

    fn done(&self, stats: &CellStats) -> bool {
        match *self {
            StoppingRule::FixedTrials { trials } => stats.frames >= trials,
            StoppingRule::TargetErrors {
                frame_errors,
                min_trials,
                max_trials,
            } => {
                stats.frames >= max_trials
                    || (stats.frames >= min_trials && stats.frame_errors >= frame_errors)
            }
        }
    }
}

/// A Monte-Carlo sweep over algorithms and an SNR grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    /// Free-form code identifier (usually the alist path).
    pub code_id: String,
    pub algorithms: Vec<AlgoSpec>,
    /// Eb/N0 grid in dB, strictly increasing.
    pub snr_grid_db: Vec<f64>,
    pub stopping: StoppingRule,
    pub base_seed: u64,
    /// Reuse identical noise for every algorithm.
    pub paired: bool,
    /// Collect operation counters.
    pub instrument: bool,
}

impl SweepSpec {
    pub fn new(code_id: &str, algorithms: Vec<AlgoSpec>, snr_grid_db: Vec<f64>) -> Self {
        SweepSpec {
            code_id: code_id.to_string(),
            algorithms,
            snr_grid_db,
            stopping: StoppingRule::default(),
            base_seed: 0,
            paired: false,
            instrument: false,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::InvalidSpec(m));
        if self.algorithms.is_empty() {
            return bad("no algorithms".into());
        }
        if self.snr_grid_db.is_empty() {
            return bad("empty SNR grid".into());
        }
        if self.snr_grid_db.iter().any(|s| !s.is_finite()) {
            return bad("SNR grid values must be finite".into());
        }
        if self.snr_grid_db.windows(2).any(|w| w[0] >= w[1]) {
            return bad("SNR grid must be strictly increasing".into());
        }
        let mut labels: Vec<&str> = self.algorithms.iter().map(|a| a.label.as_str()).collect();
        labels.sort_unstable();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return bad("duplicate algorithm labels".into());
        }
        match self.stopping {
            StoppingRule::FixedTrials { trials: 0 } => bad("trials must be positive".into()),
            StoppingRule::TargetErrors {
                frame_errors,
                min_trials,
                max_trials,
            } if frame_errors == 0 || max_trials == 0 || min_trials > max_trials => {
                bad("target-error rule needs positive targets and min_trials <= max_trials".into())
            }
            _ => Ok(()),
        }
    }

    /// SHA-256 of the spec's JSON form.
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("spec serializes");
        hex(&Sha256::digest(bytes))
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// SHA-256 of the code's canonical alist text.
pub fn code_digest(code: &ParityCheckCode) -> String {
    hex(&Sha256::digest(code.to_alist().as_bytes()))
}

/// Noise generator for one trial of one cell.
pub fn trial_rng(base_seed: u64, snr_index: u64, stream: u64, trial: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&base_seed.to_le_bytes());
    key[8..16].copy_from_slice(&snr_index.to_le_bytes());
    key[16..24].copy_from_slice(&stream.to_le_bytes());
    key[24..].copy_from_slice(&trial.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Outcome of one transmitted frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialRecord {
    pub bit_errors: u64,
    pub converged: bool,
    pub iterations: u64,
    pub ops: Option<OpCounters>,
}

impl TrialRecord {
    pub fn frame_error(&self) -> bool {
        self.bit_errors > 0
    }
}

/// Sends the all-zero codeword through AWGN of standard deviation `sigma`
/// (noise from `rng`) and decodes it.
pub fn run_trial_with<R: RngCore>(
    code: &ParityCheckCode,
    decoder: &mut Decoder<'_>,
    sigma: f64,
    rng: &mut R,
) -> Result<TrialRecord, HarnessError> {
    let x = vec![1.0; code.n_vars()];
    let y = channel::awgn_with(&x, sigma, rng)?;
    let llr = if sigma == 0.0 {
        channel::noiseless_llr(&y)
    } else {
        channel::llr(&y, sigma)?
    };
    trial_from_llr(decoder, &llr)
}

fn trial_from_llr(decoder: &mut Decoder<'_>, llr: &LlrBlock) -> Result<TrialRecord, HarnessError> {
    let out = decoder.decode(llr)?;
    Ok(TrialRecord {
        bit_errors: out.bits.weight() as u64,
        converged: out.converged,
        iterations: out.iterations as u64,
        ops: out.ops,
    })
}

/// One instrumented trial with noise from `ChaCha8Rng::seed_from_u64(trial_seed)`.
pub fn run_trial(
    code: &ParityCheckCode,
    config: &DecoderConfig,
    sigma: f64,
    trial_seed: u64,
) -> Result<TrialRecord, HarnessError> {
    let mut decoder = Decoder::new(code, config)?.instrumented(true);
    run_trial_with(code, &mut decoder, sigma, &mut ChaCha8Rng::seed_from_u64(trial_seed))
}

/// Sufficient statistics of a cell; merging is plain addition.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellStats {
    pub frames: u64,
    pub bit_errors: u64,
    pub frame_errors: u64,
    pub total_iterations: u64,
    pub converged_frames: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ops_total: Option<OpCounters>,
}

impl CellStats {
    pub fn push(&mut self, rec: &TrialRecord) {
        self.frames += 1;
        self.bit_errors += rec.bit_errors;
        self.frame_errors += u64::from(rec.frame_error());
        self.total_iterations += rec.iterations;
        self.converged_frames += u64::from(rec.converged);
        if let Some(ops) = &rec.ops {
            self.ops_total.get_or_insert_with(OpCounters::default).merge(ops);
        }
    }

    pub fn merge(&mut self, other: &CellStats) {
        self.frames += other.frames;
        self.bit_errors += other.bit_errors;
        self.frame_errors += other.frame_errors;
        self.total_iterations += other.total_iterations;
        self.converged_frames += other.converged_frames;
        if let Some(ops) = &other.ops_total {
            self.ops_total.get_or_insert_with(OpCounters::default).merge(ops);
        }
    }

    pub fn ber(&self, n_vars: usize) -> f64 {
        if self.frames == 0 {
            return 0.0;
        }
        self.bit_errors as f64 / (self.frames as f64 * n_vars as f64)
    }

    pub fn fer(&self) -> f64 {
        if self.frames == 0 {
            return 0.0;
        }
        self.frame_errors as f64 / self.frames as f64
    }

    pub fn mean_iterations(&self) -> f64 {
        if self.frames == 0 {
            return 0.0;
        }
        self.total_iterations as f64 / self.frames as f64
    }

    /// Mean operations of all kinds per frame, when instrumented.
    pub fn mean_ops_per_frame(&self) -> Option<f64> {
        let ops = self.ops_total.as_ref()?;
        Some(ops.total().total() as f64 / self.frames.max(1) as f64)
    }
}

/// Results for one (algorithm, SNR) point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub algo: String,
    pub algorithm: Algorithm,
    pub snr_db: f64,
    pub sigma: f64,
    #[serde(flatten)]
    pub stats: CellStats,
    pub ber: f64,
    pub fer: f64,
    pub mean_iters: f64,
    /// The stopping rule's error target was not reached.
    pub low_confidence: bool,
}

impl CellResult {
    fn new(algo: &AlgoSpec, snr_db: f64, sigma: f64, stats: CellStats, n_vars: usize, low_confidence: bool) -> Self {
        CellResult {
            algo: algo.label.clone(),
            algorithm: algo.config.algorithm,
            snr_db,
            sigma,
            ber: stats.ber(n_vars),
            fer: stats.fer(),
            mean_iters: stats.mean_iterations(),
            stats,
            low_confidence,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultMetadata {
    pub tool_version: String,
    pub code_id: String,
    pub code_sha256: String,
    pub n_vars: usize,
    pub n_checks: usize,
    pub rate: f64,
    pub base_seed: u64,
    pub spec_sha256: String,
    pub noise: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub schema_version: u32,
    pub metadata: ResultMetadata,
    pub spec: SweepSpec,
    pub cells: Vec<CellResult>,
}

impl SweepResult {
    pub fn cell(&self, algo: &str, snr_db: f64) -> Option<&CellResult> {
        self.cells.iter().find(|c| c.algo == algo && c.snr_db == snr_db)
    }

    /// Cells of one algorithm in grid order.
    pub fn curve(&self, algo: &str) -> Vec<&CellResult> {
        self.cells.iter().filter(|c| c.algo == algo).collect()
    }

    pub fn labels(&self) -> Vec<String> {
        self.spec.algorithms.iter().map(|a| a.label.clone()).collect()
    }

    /// Average iterations per algorithm over the grid.
    pub fn iteration_profile(&self) -> IterationProfile {
        let mut p = IterationProfile::default();
        for c in &self.cells {
            p.insert(&c.algo, c.snr_db, c.mean_iters);
        }
        p
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("result serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| HarnessError::Format(e.to_string()))?;
        let found = value
            .get("schema_version")
            .and_then(serde_json::Value::as_u64)
            .ok_or_else(|| HarnessError::Format("missing schema_version".into()))?;
        if found != u64::from(SCHEMA_VERSION) {
            return Err(HarnessError::SchemaVersion {
                found,
                expected: SCHEMA_VERSION,
            });
        }
        serde_json::from_value(value).map_err(|e| HarnessError::Format(e.to_string()))
    }

    /// CSV rows under [`CSV_HEADER`].
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER.split(',')).expect("in-memory write");
        for c in &self.cells {
            w.write_record([
                c.algo.clone(),
                c.snr_db.to_string(),
                c.stats.frames.to_string(),
                c.stats.bit_errors.to_string(),
                c.stats.frame_errors.to_string(),
                c.ber.to_string(),
                c.fer.to_string(),
                c.mean_iters.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}

pub fn write_results(result: &SweepResult, path: &Path) -> Result<(), HarnessError> {
    let mut f = fs::File::create(path)?;
    f.write_all(result.to_json().as_bytes())?;
    Ok(())
}

pub fn read_results(path: &Path) -> Result<SweepResult, HarnessError> {
    SweepResult::from_json(&fs::read_to_string(path)?)
}

pub fn write_csv(result: &SweepResult, path: &Path) -> Result<(), HarnessError> {
    fs::write(path, result.to_csv())?;
    Ok(())
}

/// Runs trials `range` of one cell; records come back in trial order.
fn run_batch(
    code: &ParityCheckCode,
    algo: &AlgoSpec,
    spec: &SweepSpec,
    snr_index: u64,
    stream: u64,
    sigma: f64,
    snr_db: f64,
    range: std::ops::Range<u64>,
) -> Result<Vec<TrialRecord>, HarnessError> {
    range
        .into_par_iter()
        .map_init(
            || {
                Decoder::new(code, &algo.config)
                    .expect("config validated")
                    .instrumented(spec.instrument)
            },
            |decoder, trial| {
                let mut rng = trial_rng(spec.base_seed, snr_index, stream, trial);
                run_trial_with(code, decoder, sigma, &mut rng).map_err(|e| match e {
                    HarnessError::Decode(source) => HarnessError::Trial {
                        algo: algo.label.clone(),
                        snr_db,
                        trial,
                        source,
                    },
                    other => other,
                })
            },
        )
        .collect()
}

/// Collects one cell's statistics for trial indices `first..` under the
/// spec's stopping rule.
pub fn run_cell(
    code: &ParityCheckCode,
    spec: &SweepSpec,
    algo_index: usize,
    snr_index: usize,
    first_trial: u64,
    rate: f64,
) -> Result<(CellStats, bool), HarnessError> {
    let algo = &spec.algorithms[algo_index];
    let snr_db = spec.snr_grid_db[snr_index];
    let sigma = channel::snr_db_to_sigma(snr_db, rate)?;
    let stream = if spec.paired {
        PAIRED_STREAM
    } else {
        algo_index as u64
    };
    let mut stats = CellStats::default();
    let max = spec.stopping.max_trials();
    let mut next = first_trial;
    'outer: while !spec.stopping.done(&stats) {
        let end = (next + BATCH).min(first_trial + max);
        let records = run_batch(code, algo, spec, snr_index as u64, stream, sigma, snr_db, next..end)?;
        for rec in &records {
            stats.push(rec);
            if spec.stopping.done(&stats) {
                break 'outer;
            }
        }
        next = end;
    }
    let low_confidence = matches!(
        spec.stopping,
        StoppingRule::TargetErrors { frame_errors, .. } if stats.frame_errors < frame_errors
    );
    Ok((stats, low_confidence))
}

/// Runs every (algorithm, SNR) cell of `spec` on `code` with `workers`
/// threads (0 = rayon's default).
pub fn run_sweep(code: &ParityCheckCode, spec: &SweepSpec, workers: usize) -> Result<SweepResult, HarnessError> {
    spec.validate()?;
    for a in &spec.algorithms {
        Decoder::new(code, &a.config)?;
    }
    let rate = code.rate();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| HarnessError::InvalidSpec(format!("thread pool: {e}")))?;

    let cells = pool.install(|| -> Result<Vec<CellResult>, HarnessError> {
        let mut cells = Vec::with_capacity(spec.algorithms.len() * spec.snr_grid_db.len());
        for (ai, algo) in spec.algorithms.iter().enumerate() {
            for (si, &snr_db) in spec.snr_grid_db.iter().enumerate() {
                let (stats, low) = run_cell(code, spec, ai, si, 0, rate)?;
                let sigma = channel::snr_db_to_sigma(snr_db, rate)?;
                cells.push(CellResult::new(algo, snr_db, sigma, stats, code.n_vars(), low));
            }
        }
        Ok(cells)
    })?;

    Ok(SweepResult {
        schema_version: SCHEMA_VERSION,
        metadata: ResultMetadata {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            code_id: spec.code_id.clone(),
            code_sha256: code_digest(code),
            n_vars: code.n_vars(),
            n_checks: code.n_checks(),
            rate,
            base_seed: spec.base_seed,
            spec_sha256: spec.digest(),
            noise: channel::GAUSSIAN_METHOD.to_string(),
        },
        spec: spec.clone(),
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code() -> ParityCheckCode {
        // (7,4) Hamming code
        ParityCheckCode::from_dense(
            3,
            7,
            &[
                1, 0, 0, 1, 1, 0, 1, //
                0, 1, 0, 1, 0, 1, 1, //
                0, 0, 1, 0, 1, 1, 1,
            ],
        )
        .unwrap()
    }

    #[test]
    fn noiseless_trial_is_clean() {
        let c = code();
        for a in Algorithm::ALL {
            let rec = run_trial(&c, &DecoderConfig::new(a), 0.0, 9).unwrap();
            assert_eq!(rec.bit_errors, 0);
            assert_eq!(rec.iterations, 0);
            assert!(rec.converged);
        }
    }

    #[test]
    fn trial_is_deterministic() {
        let c = code();
        let cfg = DecoderConfig::new(Algorithm::Sp);
        assert_eq!(run_trial(&c, &cfg, 0.9, 3).unwrap(), run_trial(&c, &cfg, 0.9, 3).unwrap());
    }

    #[test]
    fn stopping_rules() {
        let c = code();
        let mut spec = SweepSpec::new("hamming", vec![AlgoSpec::of(Algorithm::Ms)], vec![-2.0]);
        spec.stopping = StoppingRule::TargetErrors {
            frame_errors: 5,
            min_trials: 10,
            max_trials: 10_000,
        };
        let r = run_sweep(&c, &spec, 2).unwrap();
        let s = &r.cells[0].stats;
        assert_eq!(s.frame_errors, 5);
        assert!(s.frames >= 10);
        assert!(!r.cells[0].low_confidence);

        spec.snr_grid_db = vec![30.0];
        spec.stopping = StoppingRule::TargetErrors {
            frame_errors: 5,
            min_trials: 1,
            max_trials: 50,
        };
        let r = run_sweep(&c, &spec, 2).unwrap();
        assert_eq!(r.cells[0].stats.frames, 50);
        assert!(r.cells[0].low_confidence);
    }

    #[test]
    fn rejects_bad_specs() {
        let c = code();
        let mut spec = SweepSpec::new("h", vec![AlgoSpec::of(Algorithm::Sp)], vec![2.0, 1.0]);
        assert!(run_sweep(&c, &spec, 1).is_err());
        spec.snr_grid_db = vec![];
        assert!(run_sweep(&c, &spec, 1).is_err());
        spec.snr_grid_db = vec![1.0];
        spec.stopping = StoppingRule::FixedTrials { trials: 0 };
        assert!(run_sweep(&c, &spec, 1).is_err());
        spec.stopping = StoppingRule::FixedTrials { trials: 1 };
        spec.algorithms = vec![AlgoSpec::of(Algorithm::Sp), AlgoSpec::of(Algorithm::Sp)];
        assert!(run_sweep(&c, &spec, 1).is_err());
    }

    #[test]
    fn schema_version_checked() {
        let c = code();
        let mut spec = SweepSpec::new("h", vec![AlgoSpec::of(Algorithm::Wbf)], vec![3.0]);
        spec.stopping = StoppingRule::FixedTrials { trials: 20 };
        let r = run_sweep(&c, &spec, 1).unwrap();
        assert_eq!(SweepResult::from_json(&r.to_json()).unwrap(), r);
        let bumped = r.to_json().replacen("\"schema_version\": 1", "\"schema_version\": 99", 1);
        assert!(matches!(
            SweepResult::from_json(&bumped),
            Err(HarnessError::SchemaVersion { found: 99, .. })
        ));
    }

    #[test]
    fn csv_header_and_rows() {
        let c = code();
        let mut spec = SweepSpec::new("h", vec![AlgoSpec::of(Algorithm::Ms)], vec![1.0, 2.0]);
        spec.stopping = StoppingRule::FixedTrials { trials: 10 };
        let csv = run_sweep(&c, &spec, 1).unwrap().to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row[0], "ms");
        assert_eq!(row[1], "1");
        assert_eq!(row[2], "10");
        assert_eq!(csv.lines().count(), 3);
    }
}
