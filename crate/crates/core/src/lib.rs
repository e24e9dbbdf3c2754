//! LDPC decoding workbench.
//!
//! Parity-check codes from alist files, an AWGN/BPSK channel, eight iterative
//! decoders (four belief-propagation, four bit-flipping) with operation
//! counters, a deterministic Monte-Carlo error-rate harness, iteration-scaled
//! energy and data-rate estimates, and SNR-driven algorithm selection.
//!
//! Bit convention: bit 0 is sent as `+1`, bit 1 as `-1`, and a positive LLR
//! favours bit 0.

pub mod bf;
pub mod bp;
pub mod channel;
pub mod code;
pub mod decoder;
pub mod harness;
pub mod metrics;
pub mod policy;

pub use channel::LlrBlock;
pub use code::{CodeError, HardBits, ParityCheckCode, Syndrome};
pub use decoder::{decode, Algorithm, DecodeError, DecodeOutcome, Decoder, DecoderConfig};
pub use harness::{run_sweep, AlgoSpec, StoppingRule, SweepResult, SweepSpec};
pub use metrics::{CostModel, IterationProfile, OpCounters};
pub use policy::{build_policy, joint_manage, select_algorithm, MetricCurves, MetricKind, PolicyTable};

/// The (155, 64) Tanner code in alist form.
pub const TANNER_155_ALIST: &str = include_str!("../data/tanner155.alist");
