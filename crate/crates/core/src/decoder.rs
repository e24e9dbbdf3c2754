//! Algorithm selection and the outcome type shared by every decoder.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bf::{BfAlgorithm, BfDecoder, BfParams};
use crate::bp::{BpAlgorithm, BpDecoder, BpParams};
use crate::channel::LlrBlock;
use crate::code::{HardBits, ParityCheckCode};
use crate::metrics::OpCounters;

/// Iteration cap used when none is given.
pub const DEFAULT_MAX_ITERATIONS: usize = 100;
/// Default scale for modified min-sum. Not taken from any reference result.
pub const DEFAULT_MMS_DELTA: f64 = 0.8;
/// Default reliability weight for modified WBF. Not taken from any reference result.
pub const DEFAULT_MWBF_DELTA: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecodeError {
    #[error("LLR block has {got} values, code has {expected} variables")]
    LengthMismatch { expected: usize, got: usize },
    #[error("check {0} has fewer than two variables; extrinsic message is undefined")]
    DegenerateCheck(usize),
    #[error("empty input to check-node update")]
    EmptyCheckInput,
    #[error("variable {0} has zero channel reliability; ratio-based flipping is undefined")]
    ZeroReliability(usize),
    #[error("channel LLR for variable {0} is not finite")]
    NonFiniteLlr(usize),
    #[error("invalid decoder parameters: {0}")]
    InvalidParams(String),
    #[error("operation counters were not enabled for this decode")]
    InstrumentationDisabled,
}

/// The eight decoding algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Sp,
    LogSp,
    Ms,
    Mms,
    Wbf,
    Mwbf,
    Rrwbf,
    Irrwbf,
}

impl Algorithm {
    pub const ALL: [Algorithm; 8] = [
        Algorithm::Sp,
        Algorithm::LogSp,
        Algorithm::Ms,
        Algorithm::Mms,
        Algorithm::Wbf,
        Algorithm::Mwbf,
        Algorithm::Rrwbf,
        Algorithm::Irrwbf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Sp => "sp",
            Algorithm::LogSp => "logsp",
            Algorithm::Ms => "ms",
            Algorithm::Mms => "mms",
            Algorithm::Wbf => "wbf",
            Algorithm::Mwbf => "mwbf",
            Algorithm::Rrwbf => "rrwbf",
            Algorithm::Irrwbf => "irrwbf",
        }
    }

    /// Belief-propagation family (soft messages on every edge).
    pub fn is_bp(self) -> bool {
        self.bp().is_some()
    }

    pub fn is_bf(self) -> bool {
        self.bf().is_some()
    }

    pub(crate) fn bp(self) -> Option<BpAlgorithm> {
        match self {
            Algorithm::Sp => Some(BpAlgorithm::Sp),
            Algorithm::LogSp => Some(BpAlgorithm::LogSp),
            Algorithm::Ms => Some(BpAlgorithm::Ms),
            Algorithm::Mms => Some(BpAlgorithm::Mms),
            _ => None,
        }
    }

    pub(crate) fn bf(self) -> Option<BfAlgorithm> {
        match self {
            Algorithm::Wbf => Some(BfAlgorithm::Wbf),
            Algorithm::Mwbf => Some(BfAlgorithm::Mwbf),
            Algorithm::Rrwbf => Some(BfAlgorithm::Rrwbf),
            Algorithm::Irrwbf => Some(BfAlgorithm::Irrwbf),
            _ => None,
        }
    }

    /// Default `delta` for the algorithm: 1 for MS, 0 for WBF.
    pub fn default_delta(self) -> f64 {
        match self {
            Algorithm::Ms => 1.0,
            Algorithm::Mms => DEFAULT_MMS_DELTA,
            Algorithm::Mwbf => DEFAULT_MWBF_DELTA,
            _ => 0.0,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == lower || (lower == "log-sp" && *a == Algorithm::LogSp))
            .ok_or_else(|| format!("unknown algorithm {s:?}"))
    }
}

/// Full decoder configuration for any of the eight algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecoderConfig {
    pub algorithm: Algorithm,
    /// MS/MMS scale, or MWBF reliability weight.
    pub delta: f64,
    /// RRWBF normalization factor.
    pub beta_norm: f64,
    pub max_iterations: usize,
}

impl DecoderConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        DecoderConfig {
            algorithm,
            delta: algorithm.default_delta(),
            beta_norm: 1.0,
            max_iterations: DEFAULT_MAX_ITERATIONS,
        }
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_beta_norm(mut self, beta: f64) -> Self {
        self.beta_norm = beta;
        self
    }

    pub fn with_max_iterations(mut self, n: usize) -> Self {
        self.max_iterations = n;
        self
    }

    pub fn bp_params(&self) -> Option<BpParams> {
        self.algorithm.bp().map(|algorithm| BpParams {
            algorithm,
            delta: self.delta,
            max_iterations: self.max_iterations,
            ..BpParams::new(algorithm)
        })
    }

    pub fn bf_params(&self) -> Option<BfParams> {
        self.algorithm.bf().map(|algorithm| BfParams {
            algorithm,
            delta: self.delta,
            beta_norm: self.beta_norm,
            max_iterations: self.max_iterations,
        })
    }
}

/// Result of decoding one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeOutcome {
    /// Decided bits.
    pub bits: HardBits,
    /// Completed iterations (check+variable passes for BP, flips for BF).
    pub iterations: usize,
    /// True when the decided bits satisfy every check.
    pub converged: bool,
    /// Soft values whose signs give `bits`: `lambda_n` for BP, the channel
    /// LLR with flipped bits negated for BF.
    pub posteriors: Vec<f64>,
    /// Operation counts, present when the decoder was instrumented.
    pub ops: Option<OpCounters>,
}

/// A decoder of either family bound to one code. Owns its message buffers,
/// so one instance serves many frames on one thread.
#[derive(Debug, Clone)]
pub enum Decoder<'a> {
    Bp(BpDecoder<'a>),
    Bf(BfDecoder<'a>),
}

impl<'a> Decoder<'a> {
    pub fn new(code: &'a ParityCheckCode, config: &DecoderConfig) -> Result<Self, DecodeError> {
        if let Some(p) = config.bp_params() {
            Ok(Decoder::Bp(BpDecoder::new(code, p)?))
        } else {
            let p = config.bf_params().expect("algorithm is BP or BF");
            Ok(Decoder::Bf(BfDecoder::new(code, p)?))
        }
    }

    /// Enables operation counting for subsequent decodes.
    pub fn instrumented(self, on: bool) -> Self {
        match self {
            Decoder::Bp(d) => Decoder::Bp(d.instrumented(on)),
            Decoder::Bf(d) => Decoder::Bf(d.instrumented(on)),
        }
    }

    pub fn decode(&mut self, llr: &LlrBlock) -> Result<DecodeOutcome, DecodeError> {
        match self {
            Decoder::Bp(d) => d.decode(llr),
            Decoder::Bf(d) => d.decode(llr),
        }
    }
}

/// Decodes one frame with a fresh, instrumented decoder.
pub fn decode(
    code: &ParityCheckCode,
    llr: &LlrBlock,
    config: &DecoderConfig,
) -> Result<DecodeOutcome, DecodeError> {
    Decoder::new(code, config)?.instrumented(true).decode(llr)
}

pub(crate) fn check_llr(code: &ParityCheckCode, llr: &LlrBlock) -> Result<(), DecodeError> {
    if llr.len() != code.n_vars() {
        return Err(DecodeError::LengthMismatch {
            expected: code.n_vars(),
            got: llr.len(),
        });
    }
    if let Some(n) = llr.0.iter().position(|v| !v.is_finite()) {
        return Err(DecodeError::NonFiniteLlr(n));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
            assert_eq!(a.name().to_uppercase().parse::<Algorithm>().unwrap(), a);
        }
        assert!("foo".parse::<Algorithm>().is_err());
        assert_eq!(
            serde_json::to_string(&Algorithm::LogSp).unwrap(),
            "\"logsp\""
        );
    }

    #[test]
    fn defaults() {
        assert_eq!(DecoderConfig::new(Algorithm::Mms).delta, 0.8);
        assert_eq!(DecoderConfig::new(Algorithm::Ms).delta, 1.0);
        assert_eq!(DecoderConfig::new(Algorithm::Mwbf).delta, 0.2);
        assert_eq!(DecoderConfig::new(Algorithm::Wbf).delta, 0.0);
        assert_eq!(DecoderConfig::new(Algorithm::Sp).max_iterations, 100);
    }
}
