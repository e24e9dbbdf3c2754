//! Hardware-independent operation counters.
//!
//! Decoders tally the arithmetic they perform per phase of the decoding loop.
//! Counts are added in bulk per node rather than per instruction, so every
//! tally sits next to the loop it describes.

use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};

/// Decoding phase an operation belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Init,
    Check,
    Variable,
    Decision,
}

impl Phase {
    pub const ALL: [Phase; 4] = [Phase::Init, Phase::Check, Phase::Variable, Phase::Decision];
}

/// Operation counts for one phase.
///
/// `sign` covers sign extraction, sign products and absolute values.
/// Parity (XOR) updates count as additions.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCounts {
    pub add: u64,
    pub mul: u64,
    pub div: u64,
    pub cmp: u64,
    pub sign: u64,
    pub tanh: u64,
    pub atanh: u64,
    pub log: u64,
}

impl OpCounts {
    pub fn transcendental(&self) -> u64 {
        self.tanh + self.atanh + self.log
    }

    pub fn total(&self) -> u64 {
        self.add + self.mul + self.div + self.cmp + self.sign + self.transcendental()
    }

    pub fn scaled(&self, k: u64) -> OpCounts {
        OpCounts {
            add: self.add * k,
            mul: self.mul * k,
            div: self.div * k,
            cmp: self.cmp * k,
            sign: self.sign * k,
            tanh: self.tanh * k,
            atanh: self.atanh * k,
            log: self.log * k,
        }
    }

    pub fn is_zero(&self) -> bool {
        *self == OpCounts::default()
    }
}

impl Add for OpCounts {
    type Output = OpCounts;

    fn add(self, o: OpCounts) -> OpCounts {
        OpCounts {
            add: self.add + o.add,
            mul: self.mul + o.mul,
            div: self.div + o.div,
            cmp: self.cmp + o.cmp,
            sign: self.sign + o.sign,
            tanh: self.tanh + o.tanh,
            atanh: self.atanh + o.atanh,
            log: self.log + o.log,
        }
    }
}

impl AddAssign for OpCounts {
    fn add_assign(&mut self, o: OpCounts) {
        *self = *self + o;
    }
}

/// Per-phase operation counts for a decode (or a sum of decodes).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCounters {
    pub init: OpCounts,
    pub check: OpCounts,
    pub variable: OpCounts,
    pub decision: OpCounts,
}

impl OpCounters {
    pub fn phase(&self, phase: Phase) -> &OpCounts {
        match phase {
            Phase::Init => &self.init,
            Phase::Check => &self.check,
            Phase::Variable => &self.variable,
            Phase::Decision => &self.decision,
        }
    }

    pub fn phase_mut(&mut self, phase: Phase) -> &mut OpCounts {
        match phase {
            Phase::Init => &mut self.init,
            Phase::Check => &mut self.check,
            Phase::Variable => &mut self.variable,
            Phase::Decision => &mut self.decision,
        }
    }

    pub fn total(&self) -> OpCounts {
        self.init + self.check + self.variable + self.decision
    }

    pub fn merge(&mut self, other: &OpCounters) {
        for p in Phase::ALL {
            *self.phase_mut(p) += *other.phase(p);
        }
    }
}

/// Optional tally sink; a disabled tally ignores every update.
#[derive(Debug, Clone, Default)]
pub(crate) struct Tally(Option<OpCounters>);

impl Tally {
    pub(crate) fn new(enabled: bool) -> Self {
        Tally(enabled.then(OpCounters::default))
    }

    #[inline]
    pub(crate) fn add(&mut self, phase: Phase, ops: OpCounts) {
        if let Some(c) = self.0.as_mut() {
            *c.phase_mut(phase) += ops;
        }
    }

    pub(crate) fn finish(self) -> Option<OpCounters> {
        self.0
    }
}
