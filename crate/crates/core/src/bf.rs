//! Weighted bit-flipping decoders: WBF, modified WBF, reliability-ratio WBF
//! and its implementation-efficient rewrite IRRWBF.
//!
//! Each iteration tests the syndrome, computes a flip metric `E_n` for every
//! variable and flips the single bit with the largest metric (lowest index on
//! ties). The syndrome is maintained incrementally: a flip toggles exactly the
//! checks of the flipped variable.
//!
//! The metrics, with `(2 s_m - 1)` equal to +1 for an unsatisfied check and -1
//! for a satisfied one:
//!
//! * WBF / MWBF: `E_n = sum_m (2 s_m - 1) r_min_m - delta |r_n|`
//! * RRWBF: `E_n = sum_m (2 s_m - 1) / R_mn` with `R_mn = beta |r_n| / r_max_m`
//! * IRRWBF: `E_n = (1 / |r_n|) sum_m (2 s_m - 1) T_m` with `T_m = sum_{N(m)} |r_n|`
//!
//! RRWBF is evaluated literally (one division per edge per iteration). IRRWBF
//! keeps `1 / |r_n|` from initialization and needs only additions per edge.

use crate::channel::{hard_bit, LlrBlock};
use crate::code::{HardBits, ParityCheckCode, Syndrome};
use crate::decoder::{check_llr, DecodeError, DecodeOutcome};
use crate::metrics::ops::Tally;
use crate::metrics::{OpCounts, Phase};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BfAlgorithm {
    Wbf,
    Mwbf,
    Rrwbf,
    Irrwbf,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BfParams {
    pub algorithm: BfAlgorithm,
    /// MWBF weight on the bit's own reliability; 0 for WBF.
    pub delta: f64,
    /// RRWBF normalization factor.
    pub beta_norm: f64,
    pub max_iterations: usize,
}

impl BfParams {
    pub fn new(algorithm: BfAlgorithm) -> Self {
        BfParams {
            algorithm,
            delta: if algorithm == BfAlgorithm::Mwbf {
                crate::decoder::DEFAULT_MWBF_DELTA
            } else {
                0.0
            },
            beta_norm: 1.0,
            max_iterations: crate::decoder::DEFAULT_MAX_ITERATIONS,
        }
    }

    pub fn validate(&self) -> Result<(), DecodeError> {
        let bad = |m: String| Err(DecodeError::InvalidParams(m));
        if self.max_iterations == 0 {
            return bad("max_iterations must be >= 1".into());
        }
        match self.algorithm {
            BfAlgorithm::Wbf if self.delta != 0.0 => {
                bad(format!("WBF uses delta = 0, got {}", self.delta))
            }
            BfAlgorithm::Mwbf if !(self.delta >= 0.0 && self.delta.is_finite()) => {
                bad(format!("MWBF delta must be >= 0, got {}", self.delta))
            }
            BfAlgorithm::Rrwbf if !(self.beta_norm > 0.0 && self.beta_norm.is_finite()) => {
                bad(format!("RRWBF beta must be > 0, got {}", self.beta_norm))
            }
            _ => Ok(()),
        }
    }

    fn ratio_based(&self) -> bool {
        matches!(self.algorithm, BfAlgorithm::Rrwbf | BfAlgorithm::Irrwbf)
    }
}

/// Working state of a bit-flipping decode.
///
/// Only the precomputations of the active variant are filled; the others stay
/// empty.
#[derive(Debug, Clone, PartialEq)]
pub struct BfState {
    pub z: HardBits,
    pub s: Syndrome,
    pub r_abs: Vec<f64>,
    /// `min_{n in N(m)} |r_n|` (WBF, MWBF).
    pub r_min: Vec<f64>,
    /// `max_{n in N(m)} |r_n|` (RRWBF).
    pub r_max: Vec<f64>,
    /// `R_mn` per edge (RRWBF).
    pub ratio: Vec<f64>,
    /// `T_m = sum_{n in N(m)} |r_n|` (IRRWBF).
    pub t: Vec<f64>,
    /// `1 / |r_n|` (IRRWBF).
    pub inv_r_abs: Vec<f64>,
    /// Flip metric from the latest metric evaluation.
    pub e: Vec<f64>,
    unsatisfied: usize,
    /// `(2 s_m - 1) T_m`, negated alongside each syndrome toggle (IRRWBF).
    t_signed: Vec<f64>,
}

impl BfState {
    pub fn syndrome_is_zero(&self) -> bool {
        self.unsatisfied == 0
    }
}

/// Hard decisions, syndrome and the variant's per-check/per-edge reliabilities.
pub fn bf_init(
    code: &ParityCheckCode,
    llr: &LlrBlock,
    params: &BfParams,
) -> Result<BfState, DecodeError> {
    bf_init_counted(code, llr, params, &mut Tally::new(false))
}

fn bf_init_counted(
    code: &ParityCheckCode,
    llr: &LlrBlock,
    params: &BfParams,
    tally: &mut Tally,
) -> Result<BfState, DecodeError> {
    params.validate()?;
    check_llr(code, llr)?;
    let r = llr.as_slice();
    if params.ratio_based() {
        if let Some(n) = r.iter().position(|&v| v == 0.0) {
            return Err(DecodeError::ZeroReliability(n));
        }
    }
    let n_vars = code.n_vars() as u64;
    let n_checks = code.n_checks() as u64;
    let edges = code.n_edges() as u64;

    let z = HardBits(r.iter().map(|&v| hard_bit(v)).collect());
    let r_abs: Vec<f64> = r.iter().map(|v| v.abs()).collect();
    let s = code.syndrome(&z).expect("length checked");
    let unsatisfied = s.weight();
    tally.add(
        Phase::Init,
        OpCounts {
            cmp: n_vars,
            sign: n_vars,
            ..Default::default()
        },
    );
    tally.add(
        Phase::Check,
        OpCounts {
            add: edges + n_checks,
            ..Default::default()
        },
    );

    let mut state = BfState {
        z,
        s,
        r_min: Vec::new(),
        r_max: Vec::new(),
        ratio: Vec::new(),
        t: Vec::new(),
        inv_r_abs: Vec::new(),
        e: vec![0.0; code.n_vars()],
        unsatisfied,
        t_signed: Vec::new(),
        r_abs,
    };
    let row_fold = |init: f64, f: fn(f64, f64) -> f64| -> Vec<f64> {
        code.rows()
            .iter()
            .map(|row| row.iter().fold(init, |acc, &n| f(acc, r[n].abs())))
            .collect()
    };

    match params.algorithm {
        BfAlgorithm::Wbf | BfAlgorithm::Mwbf => {
            state.r_min = row_fold(f64::INFINITY, f64::min);
            tally.add(
                Phase::Init,
                OpCounts {
                    cmp: edges,
                    ..Default::default()
                },
            );
        }
        BfAlgorithm::Rrwbf => {
            state.r_max = row_fold(0.0, f64::max);
            state.ratio = (0..code.n_checks())
                .flat_map(|m| {
                    let r_max = state.r_max[m];
                    let r_abs = &state.r_abs;
                    code.row(m)
                        .iter()
                        // the ratio first, so a check's most reliable variable gets exactly beta
                        .map(move |&n| params.beta_norm * (r_abs[n] / r_max))
                })
                .collect();
            tally.add(
                Phase::Init,
                OpCounts {
                    cmp: edges,
                    mul: edges,
                    div: edges,
                    ..Default::default()
                },
            );
        }
        BfAlgorithm::Irrwbf => {
            state.t = row_fold(0.0, |acc, v| acc + v);
            state.t_signed = state.t.iter().zip(&state.s.s).map(|(&t, &s)| signed(s, t)).collect();
            state.inv_r_abs = state.r_abs.iter().map(|v| 1.0 / v).collect();
            tally.add(
                Phase::Init,
                OpCounts {
                    add: edges,
                    div: n_vars,
                    sign: n_checks,
                    ..Default::default()
                },
            );
        }
    }
    Ok(state)
}

#[inline]
fn signed(s: u8, v: f64) -> f64 {
    if s != 0 {
        v
    } else {
        -v
    }
}

/// Flip metric `E_n` of every variable for the current syndrome.
pub fn bf_metric(state: &BfState, code: &ParityCheckCode, params: &BfParams) -> Vec<f64> {
    let mut e = vec![0.0; code.n_vars()];
    fill_metric(state, code, params, &mut e);
    e
}

fn fill_metric(state: &BfState, code: &ParityCheckCode, params: &BfParams, e: &mut [f64]) -> OpCounts {
    let s = &state.s.s;
    let n_vars = code.n_vars() as u64;
    let edges = code.n_edges() as u64;
    match params.algorithm {
        BfAlgorithm::Wbf | BfAlgorithm::Mwbf => {
            let mwbf = params.algorithm == BfAlgorithm::Mwbf;
            for (n, en) in e.iter_mut().enumerate() {
                let mut acc = 0.0;
                for &m in code.col(n) {
                    acc += signed(s[m], state.r_min[m]);
                }
                *en = if mwbf {
                    acc - params.delta * state.r_abs[n]
                } else {
                    acc
                };
            }
            let mut ops = OpCounts {
                add: edges,
                sign: edges,
                ..Default::default()
            };
            if mwbf {
                ops.mul += n_vars;
                ops.add += n_vars;
            }
            ops
        }
        BfAlgorithm::Rrwbf => {
            for (n, en) in e.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (&m, &edge) in code.col(n).iter().zip(code.var_edges(n)) {
                    acc += signed(s[m], 1.0) / state.ratio[edge];
                }
                *en = acc;
            }
            OpCounts {
                add: edges,
                div: edges,
                sign: edges,
                ..Default::default()
            }
        }
        BfAlgorithm::Irrwbf => {
            // signs are kept current by flip_bit, so this sweep is sign-free
            for (n, en) in e.iter_mut().enumerate() {
                let mut acc = 0.0;
                for &m in code.col(n) {
                    acc += state.t_signed[m];
                }
                *en = state.inv_r_abs[n] * acc;
            }
            OpCounts {
                add: edges,
                mul: n_vars,
                ..Default::default()
            }
        }
    }
}

/// Index of the largest metric; the lowest index wins ties.
pub fn argmax_lowest(e: &[f64]) -> usize {
    let mut best = 0;
    for (n, &v) in e.iter().enumerate().skip(1) {
        if v > e[best] {
            best = n;
        }
    }
    best
}

/// Flips the argmax bit of `e` and toggles the syndrome of its checks.
/// Returns the flipped index.
pub fn bf_flip(state: &mut BfState, code: &ParityCheckCode, e: &[f64]) -> usize {
    let n = argmax_lowest(e);
    flip_bit(state, code, n);
    n
}

fn flip_bit(state: &mut BfState, code: &ParityCheckCode, n: usize) {
    state.z.0[n] ^= 1;
    for &m in code.col(n) {
        let s = &mut state.s.s[m];
        *s ^= 1;
        if *s == 1 {
            state.unsatisfied += 1;
        } else {
            state.unsatisfied -= 1;
        }
        if let Some(t) = state.t_signed.get_mut(m) {
            *t = -*t;
        }
    }
}

/// Decodes one frame with a fresh decoder.
pub fn run_bf(
    code: &ParityCheckCode,
    llr: &LlrBlock,
    params: BfParams,
) -> Result<DecodeOutcome, DecodeError> {
    BfDecoder::new(code, params)?.instrumented(true).decode(llr)
}

/// Bit-flipping decoder bound to one code.
#[derive(Debug, Clone)]
pub struct BfDecoder<'a> {
    code: &'a ParityCheckCode,
    params: BfParams,
    instrument: bool,
    verify: bool,
    flips: Vec<usize>,
}

impl<'a> BfDecoder<'a> {
    pub fn new(code: &'a ParityCheckCode, params: BfParams) -> Result<Self, DecodeError> {
        params.validate()?;
        Ok(BfDecoder {
            code,
            params,
            instrument: false,
            verify: false,
            flips: Vec::new(),
        })
    }

    pub fn instrumented(mut self, on: bool) -> Self {
        self.instrument = on;
        self
    }

    /// Recomputes the syndrome from scratch after every flip and panics if
    /// the incremental update disagrees.
    pub fn verify_syndrome(mut self, on: bool) -> Self {
        self.verify = on;
        self
    }

    pub fn params(&self) -> &BfParams {
        &self.params
    }

    /// Indices flipped by the last decode, in order.
    pub fn flips(&self) -> &[usize] {
        &self.flips
    }

    pub fn decode(&mut self, llr: &LlrBlock) -> Result<DecodeOutcome, DecodeError> {
        let code = self.code;
        let mut tally = Tally::new(self.instrument);
        let mut state = bf_init_counted(code, llr, &self.params, &mut tally)?;
        let mut e = std::mem::take(&mut state.e);
        self.flips.clear();

        let n_vars = code.n_vars() as u64;
        let mut iterations = 0;
        let converged = loop {
            tally.add(
                Phase::Decision,
                OpCounts {
                    cmp: 1,
                    ..Default::default()
                },
            );
            if state.syndrome_is_zero() {
                break true;
            }
            if iterations == self.params.max_iterations {
                break false;
            }
            let ops = fill_metric(&state, code, &self.params, &mut e);
            tally.add(Phase::Variable, ops);
            let n = argmax_lowest(&e);
            flip_bit(&mut state, code, n);
            self.flips.push(n);
            tally.add(
                Phase::Decision,
                OpCounts {
                    cmp: n_vars - 1,
                    add: 1,
                    ..Default::default()
                },
            );
            let w = code.col(n).len() as u64;
            let irrwbf = self.params.algorithm == BfAlgorithm::Irrwbf;
            tally.add(
                Phase::Check,
                OpCounts {
                    add: w,
                    sign: if irrwbf { w } else { 0 },
                    ..Default::default()
                },
            );
            iterations += 1;
            if self.verify {
                let fresh = code.syndrome(&state.z).expect("length checked");
                assert_eq!(fresh, state.s, "incremental syndrome diverged after flip {n}");
                assert_eq!(fresh.weight(), state.unsatisfied);
                for (m, &t) in state.t_signed.iter().enumerate() {
                    assert_eq!(t, signed(fresh.s[m], state.t[m]), "signed T diverged at check {m}");
                }
            }
        };

        let posteriors = state
            .z
            .0
            .iter()
            .zip(&state.r_abs)
            .map(|(&b, &a)| if b == 0 { a } else { -a })
            .collect();
        Ok(DecodeOutcome {
            bits: state.z,
            iterations,
            converged,
            posteriors,
            ops: tally.finish(),
        })
    }
}
