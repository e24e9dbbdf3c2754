//! Belief-propagation decoders: sum-product, log-domain sum-product, min-sum
//! and modified (scaled) min-sum.
//!
//! All four share one flooding loop over edge-indexed message buffers: every
//! check node is updated, then every variable node, then the posterior
//! decision and syndrome test. The channel hard decision is tested before the
//! first iteration, so a clean frame costs zero iterations.
//!
//! Messages are kept finite with two clamps. Variable-to-check messages are
//! limited to `±clamp` (30 by default) and the sum-product tanh product is
//! limited to `±(1 - 1e-12)` before `atanh`, which caps check outputs at
//! [`check_saturation`]. The log-domain variant applies
//! `phi(x) = -ln(tanh(x / 2))` to arguments clamped into `[phi(clamp), clamp]`
//! and caps its check outputs at the same bound, so the two variants agree to
//! rounding everywhere.
//!
//! The scalar functions ([`check_update_sp`], [`check_update_ms`], ...) are the
//! reference form of each node rule. The decoder loop computes the same
//! expressions in the same order per node, so its messages match the scalar
//! functions bit for bit.

use crate::channel::{hard_bit, LlrBlock};
use crate::code::{HardBits, ParityCheckCode};
use crate::decoder::{check_llr, DecodeError, DecodeOutcome};
use crate::metrics::ops::Tally;
use crate::metrics::{OpCounts, Phase};

/// Default bound on variable-to-check message magnitude.
pub const LLR_CLAMP: f64 = 30.0;
/// Bound on the tanh product before `atanh`.
pub const PRODUCT_CLAMP: f64 = 1.0 - 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BpAlgorithm {
    Sp,
    LogSp,
    Ms,
    Mms,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BpParams {
    pub algorithm: BpAlgorithm,
    /// Check-output scale for MS/MMS; must be 1 for MS.
    pub delta: f64,
    pub max_iterations: usize,
    pub clamp: f64,
}

impl BpParams {
    pub fn new(algorithm: BpAlgorithm) -> Self {
        BpParams {
            algorithm,
            delta: if algorithm == BpAlgorithm::Mms {
                crate::decoder::DEFAULT_MMS_DELTA
            } else {
                1.0
            },
            max_iterations: crate::decoder::DEFAULT_MAX_ITERATIONS,
            clamp: LLR_CLAMP,
        }
    }

    pub fn validate(&self) -> Result<(), DecodeError> {
        let bad = |m: String| Err(DecodeError::InvalidParams(m));
        if self.max_iterations == 0 {
            return bad("max_iterations must be >= 1".into());
        }
        if !(self.clamp > 0.0 && self.clamp.is_finite()) {
            return bad(format!("clamp must be positive and finite, got {}", self.clamp));
        }
        match self.algorithm {
            BpAlgorithm::Mms if !(self.delta > 0.0 && self.delta <= 1.0) => {
                bad(format!("MMS delta must be in (0, 1], got {}", self.delta))
            }
            BpAlgorithm::Ms if self.delta != 1.0 => {
                bad(format!("min-sum uses delta = 1, got {}", self.delta))
            }
            _ => Ok(()),
        }
    }
}

/// Edge-indexed message buffers, numbered as in [`ParityCheckCode::check_edges`].
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeMessages {
    /// Variable-to-check messages.
    pub alpha: Vec<f64>,
    /// Check-to-variable messages.
    pub beta: Vec<f64>,
}

impl EdgeMessages {
    pub fn zeros(n_edges: usize) -> Self {
        EdgeMessages {
            alpha: vec![0.0; n_edges],
            beta: vec![0.0; n_edges],
        }
    }
}

#[inline]
fn clamp_llr(v: f64, clamp: f64) -> f64 {
    v.clamp(-clamp, clamp)
}

/// `-ln(tanh(x / 2))` with `x` clamped into `[phi(clamp), clamp]`.
///
/// The map is its own inverse on `(0, inf)`. Evaluated as
/// `ln(1 + 2 / (e^x - 1))`: the direct form rounds `tanh` to 1 for large `x`
/// and loses about five digits at the clamp.
#[inline]
pub fn phi(x: f64, clamp: f64) -> f64 {
    let lo = phi_floor(clamp);
    (2.0 / x.clamp(lo, clamp).exp_m1()).ln_1p()
}

#[inline]
fn phi_floor(clamp: f64) -> f64 {
    (2.0 / clamp.exp_m1()).ln_1p()
}

// phi: two clamp comparisons, expm1 (tallied with tanh), division, ln_1p
const PHI_OPS: OpCounts = OpCounts {
    add: 0,
    mul: 0,
    div: 1,
    cmp: 2,
    sign: 0,
    tanh: 1,
    atanh: 0,
    log: 1,
};

/// Log-domain transform of an LLR: `(phi(|v|), sign(v))`, with `v >= 0`
/// taken as positive.
pub fn logsp_transform(v: f64, clamp: f64) -> (f64, f64) {
    (phi(v.abs(), clamp), if v < 0.0 { -1.0 } else { 1.0 })
}

/// Sum-product check rule on the extrinsic inputs:
/// `2 atanh(prod tanh(alpha / 2))`, product clamped to `±(1 - 1e-12)`.
///
/// A single input is passed through unchanged. Evaluated as
/// `ln((1 + p) / (1 - p))` with `1 - p` accumulated directly, which keeps full
/// precision when the product approaches 1.
pub fn check_update_sp(alphas_excl: &[f64]) -> Result<f64, DecodeError> {
    match alphas_excl {
        [] => Err(DecodeError::EmptyCheckInput),
        [a] => Ok(clamp_llr(*a, LLR_CLAMP)),
        _ => {
            let mut sign = 1.0;
            for &a in alphas_excl {
                if a < 0.0 {
                    sign = -sign;
                }
            }
            let mag = sp_magnitude(alphas_excl.iter().map(|&a| half_tanh(clamp_llr(a, LLR_CLAMP))));
            Ok(sign * mag)
        }
    }
}

/// Largest check-to-variable magnitude: `2 atanh(1 - 1e-12)`, about 28.3.
///
/// Both sum-product variants saturate here whenever two or more inputs are
/// combined.
pub fn check_saturation() -> f64 {
    2.0 * PRODUCT_CLAMP.atanh()
}

/// `(tanh(|a| / 2), 1 - tanh(|a| / 2))`, each to full relative precision.
#[inline]
fn half_tanh(a: f64) -> (f64, f64) {
    let g = a.abs().exp_m1();
    let w = 1.0 / (g + 2.0);
    (g * w, 2.0 * w)
}

/// `2 atanh(prod t)` from `(t, 1 - t)` pairs, tracking `1 - prod t` as
/// `c + u p` so no cancellation occurs.
#[inline]
fn sp_magnitude(pairs: impl Iterator<Item = (f64, f64)>) -> f64 {
    let mut p = 1.0;
    let mut c = 0.0;
    for (t, u) in pairs {
        c += u * p;
        p *= t;
    }
    if c < 1.0 - PRODUCT_CLAMP {
        check_saturation()
    } else {
        ((1.0 + p) / c).ln()
    }
}

/// Log-domain check rule: `phi(sum of magnitudes) * prod signs`.
///
/// `magnitudes` are already transformed by [`phi`]; `signs` are ±1.
pub fn check_update_logsp(magnitudes: &[f64], signs: &[f64]) -> Result<f64, DecodeError> {
    if magnitudes.is_empty() {
        return Err(DecodeError::EmptyCheckInput);
    }
    if magnitudes.len() != signs.len() {
        return Err(DecodeError::InvalidParams(format!(
            "{} magnitudes but {} signs",
            magnitudes.len(),
            signs.len()
        )));
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for (&m, &s) in magnitudes.iter().zip(signs) {
        sum += m;
        sign *= s;
    }
    // a lone input passes through, as in the sum-product rule
    let cap = if magnitudes.len() == 1 { f64::INFINITY } else { check_saturation() };
    Ok(sign * phi(sum, LLR_CLAMP).min(cap))
}

/// Min-sum check rule: `delta * prod sign(alpha) * min |alpha|`.
pub fn check_update_ms(alphas_excl: &[f64], delta: f64) -> Result<f64, DecodeError> {
    if alphas_excl.is_empty() {
        return Err(DecodeError::EmptyCheckInput);
    }
    let mut min = f64::INFINITY;
    let mut sign = 1.0;
    for &a in alphas_excl {
        min = min.min(a.abs());
        if a < 0.0 {
            sign = -sign;
        }
    }
    Ok(delta * (sign * min))
}

/// Variable rule: `r + sum betas_excl`, clamped to `±LLR_CLAMP`.
pub fn var_update(r: f64, betas_excl: &[f64]) -> f64 {
    let mut s = r;
    for &b in betas_excl {
        s += b;
    }
    clamp_llr(s, LLR_CLAMP)
}

/// Posterior `lambda_n = r_n + sum_{m in M(n)} beta_{m,n}` and its hard
/// decision (bit 0 when `lambda_n >= 0`).
pub fn posterior_decide(
    r: &LlrBlock,
    msgs: &EdgeMessages,
    code: &ParityCheckCode,
) -> (Vec<f64>, HardBits) {
    let lambda: Vec<f64> = (0..code.n_vars())
        .map(|n| {
            let mut l = r.0[n];
            for &e in code.var_edges(n) {
                l += msgs.beta[e];
            }
            l
        })
        .collect();
    let bits = HardBits(lambda.iter().map(|&l| hard_bit(l)).collect());
    (lambda, bits)
}

/// Decodes one frame with a fresh decoder.
pub fn run_bp(
    code: &ParityCheckCode,
    llr: &LlrBlock,
    params: BpParams,
) -> Result<DecodeOutcome, DecodeError> {
    BpDecoder::new(code, params)?.instrumented(true).decode(llr)
}

/// Flooding-schedule BP decoder bound to one code.
#[derive(Debug, Clone)]
pub struct BpDecoder<'a> {
    code: &'a ParityCheckCode,
    params: BpParams,
    msgs: EdgeMessages,
    // per-edge scratch for SP: tanh(|alpha| / 2) and its complement
    scratch: Vec<f64>,
    scratch_c: Vec<f64>,
    lambda: Vec<f64>,
    bits: Vec<u8>,
    instrument: bool,
}

impl<'a> BpDecoder<'a> {
    pub fn new(code: &'a ParityCheckCode, params: BpParams) -> Result<Self, DecodeError> {
        params.validate()?;
        if let Some(m) = (0..code.n_checks()).find(|&m| code.row(m).len() < 2) {
            return Err(DecodeError::DegenerateCheck(m));
        }
        Ok(BpDecoder {
            code,
            params,
            msgs: EdgeMessages::zeros(code.n_edges()),
            scratch: vec![0.0; code.n_edges()],
            scratch_c: vec![0.0; code.n_edges()],
            lambda: vec![0.0; code.n_vars()],
            bits: vec![0; code.n_vars()],
            instrument: false,
        })
    }

    pub fn instrumented(mut self, on: bool) -> Self {
        self.instrument = on;
        self
    }

    pub fn params(&self) -> &BpParams {
        &self.params
    }

    /// Message buffers as left by the last decode.
    pub fn messages(&self) -> &EdgeMessages {
        &self.msgs
    }

    pub fn decode(&mut self, llr: &LlrBlock) -> Result<DecodeOutcome, DecodeError> {
        check_llr(self.code, llr)?;
        let mut tally = Tally::new(self.instrument);
        let r = llr.as_slice();

        self.initialize(r, &mut tally);

        // channel hard decision and syndrome before iterating
        for (b, &v) in self.bits.iter_mut().zip(r) {
            *b = hard_bit(v);
        }
        let n = self.code.n_vars() as u64;
        tally.add(
            Phase::Init,
            OpCounts {
                cmp: n,
                ..Default::default()
            },
        );
        if self.syndrome_is_zero(Phase::Init, &mut tally) {
            return Ok(DecodeOutcome {
                bits: HardBits(self.bits.clone()),
                iterations: 0,
                converged: true,
                posteriors: r.to_vec(),
                ops: tally.finish(),
            });
        }

        let mut iterations = 0;
        let mut converged = false;
        while iterations < self.params.max_iterations {
            self.check_pass(&mut tally);
            self.variable_pass(r, &mut tally);
            self.decide(r, &mut tally);
            iterations += 1;
            if self.syndrome_is_zero(Phase::Decision, &mut tally) {
                converged = true;
                break;
            }
        }

        Ok(DecodeOutcome {
            bits: HardBits(self.bits.clone()),
            iterations,
            converged,
            posteriors: self.lambda.clone(),
            ops: tally.finish(),
        })
    }

    fn initialize(&mut self, r: &[f64], tally: &mut Tally) {
        let code = self.code;
        let clamp = self.params.clamp;
        let logsp = self.params.algorithm == BpAlgorithm::LogSp;
        for (e, alpha) in self.msgs.alpha.iter_mut().enumerate() {
            let v = clamp_llr(r[code.edge_var(e)], clamp);
            *alpha = if logsp {
                let (mag, sign) = logsp_transform(v, clamp);
                sign * mag
            } else {
                v
            };
        }
        self.msgs.beta.fill(0.0);
        let edges = code.n_edges() as u64;
        let mut per_edge = OpCounts {
            cmp: 2,
            ..Default::default()
        };
        if logsp {
            // abs, sign extraction and sign application around phi
            per_edge += PHI_OPS;
            per_edge.sign += 3;
        }
        tally.add(Phase::Init, per_edge.scaled(edges));
    }

    fn check_pass(&mut self, tally: &mut Tally) {
        let code = self.code;
        let alpha = &self.msgs.alpha;
        let beta = &mut self.msgs.beta;
        let clamp = self.params.clamp;
        let mut ops = OpCounts::default();
        for m in 0..code.n_checks() {
            let edges = code.check_edges(m);
            let d = edges.len();
            let du = d as u64;
            let a = &alpha[edges.clone()];
            let out = &mut beta[edges.clone()];
            match self.params.algorithm {
                BpAlgorithm::Sp => {
                    if d == 2 {
                        out[0] = a[1];
                        out[1] = a[0];
                        continue;
                    }
                    let t = &mut self.scratch[edges.clone()];
                    let u = &mut self.scratch_c[edges];
                    for ((ti, ui), &ai) in t.iter_mut().zip(u.iter_mut()).zip(a) {
                        (*ti, *ui) = half_tanh(ai);
                    }
                    for (j, o) in out.iter_mut().enumerate() {
                        let mut sign = 1.0;
                        for (i, &ai) in a.iter().enumerate() {
                            if i != j && ai < 0.0 {
                                sign = -sign;
                            }
                        }
                        let pairs = t.iter().zip(u.iter()).enumerate().filter(|&(i, _)| i != j);
                        *o = sign * sp_magnitude(pairs.map(|(_, (&ti, &ui))| (ti, ui)));
                    }
                    // per edge: abs, expm1 (tallied as tanh), add, reciprocal, two scalings;
                    // per output: d-1 accumulate steps, floor test, final ratio and log
                    ops += OpCounts {
                        add: du + du * (du - 1) + du,
                        mul: 2 * du + 2 * du * (du - 1),
                        div: du + du,
                        cmp: du,
                        sign: du + du * (du - 1) + du,
                        tanh: du,
                        log: du,
                        ..Default::default()
                    };
                }
                BpAlgorithm::LogSp => {
                    let saturation = if d == 2 { f64::INFINITY } else { check_saturation() };
                    for (j, o) in out.iter_mut().enumerate() {
                        let mut sum = 0.0;
                        let mut sign = 1.0;
                        for (i, &ai) in a.iter().enumerate() {
                            if i != j {
                                sum += ai.abs();
                                sign *= if ai < 0.0 { -1.0 } else { 1.0 };
                            }
                        }
                        *o = sign * phi(sum, clamp).min(saturation);
                    }
                    ops += OpCounts {
                        add: du * (du - 1),
                        cmp: du,
                        sign: 2 * du * (du - 1) + du,
                        ..Default::default()
                    } + PHI_OPS.scaled(du);
                }
                BpAlgorithm::Ms | BpAlgorithm::Mms => {
                    let delta = self.params.delta;
                    for (j, o) in out.iter_mut().enumerate() {
                        let mut min = f64::INFINITY;
                        let mut sign = 1.0;
                        for (i, &ai) in a.iter().enumerate() {
                            if i != j {
                                min = min.min(ai.abs());
                                if ai < 0.0 {
                                    sign = -sign;
                                }
                            }
                        }
                        *o = delta * (sign * min);
                    }
                    ops += OpCounts {
                        mul: du,
                        cmp: du * (du - 1),
                        sign: 2 * du * (du - 1) + du,
                        ..Default::default()
                    };
                }
            }
        }
        tally.add(Phase::Check, ops);
    }

    fn variable_pass(&mut self, r: &[f64], tally: &mut Tally) {
        let code = self.code;
        let beta = &self.msgs.beta;
        let alpha = &mut self.msgs.alpha;
        let clamp = self.params.clamp;
        let logsp = self.params.algorithm == BpAlgorithm::LogSp;
        let mut ops = OpCounts::default();
        for n in 0..code.n_vars() {
            let edges = code.var_edges(n);
            let k = edges.len() as u64;
            for &e in edges {
                let mut s = r[n];
                for &f in edges {
                    if f != e {
                        s += beta[f];
                    }
                }
                let v = clamp_llr(s, clamp);
                alpha[e] = if logsp {
                    let (mag, sign) = logsp_transform(v, clamp);
                    sign * mag
                } else {
                    v
                };
            }
            let mut per_var = OpCounts {
                add: k * (k - 1),
                cmp: 2 * k,
                ..Default::default()
            };
            if logsp {
                per_var += PHI_OPS.scaled(k);
                per_var.sign += 3 * k;
            }
            ops += per_var;
        }
        tally.add(Phase::Variable, ops);
    }

    fn decide(&mut self, r: &[f64], tally: &mut Tally) {
        let code = self.code;
        for n in 0..code.n_vars() {
            let mut l = r[n];
            for &e in code.var_edges(n) {
                l += self.msgs.beta[e];
            }
            self.lambda[n] = l;
            self.bits[n] = hard_bit(l);
        }
        tally.add(
            Phase::Decision,
            OpCounts {
                add: code.n_edges() as u64,
                cmp: code.n_vars() as u64,
                ..Default::default()
            },
        );
    }

    fn syndrome_is_zero(&self, phase: Phase, tally: &mut Tally) -> bool {
        let code = self.code;
        let mut unsatisfied = 0usize;
        for m in 0..code.n_checks() {
            let parity = code.row(m).iter().fold(0u8, |acc, &n| acc ^ self.bits[n]);
            unsatisfied += usize::from(parity);
        }
        tally.add(
            phase,
            OpCounts {
                add: code.n_edges() as u64,
                cmp: 1,
                ..Default::default()
            },
        );
        unsatisfied == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ParityCheckCode {
        ParityCheckCode::from_dense(2, 3, &[1, 1, 0, 0, 1, 1]).unwrap()
    }

    #[test]
    fn sp_check_examples() {
        for a in [-29.0, -3.5, -0.1, 0.0, 0.7, 12.0, 30.0] {
            assert_eq!(check_update_sp(&[a]).unwrap(), a);
        }
        assert_eq!(check_update_sp(&[0.0, 3.0, -1.0]).unwrap(), 0.0);
        // 2 atanh(-tanh(1)^2), evaluated independently
        let v = check_update_sp(&[2.0, -2.0]).unwrap();
        assert!((v - -1.325_002_747_357_864_3).abs() < 1e-12, "{v}");
        // near saturation; reference from 50-digit evaluation
        let v = check_update_sp(&[-27.677403917732843, 29.42790740920977]).unwrap();
        assert!((v - -27.517_254_291_811_926).abs() < 1e-12, "{v}");
        assert_eq!(check_update_sp(&[30.0, -30.0]).unwrap(), -check_saturation());
        // 2 atanh of the f64 nearest 1 - 1e-12
        assert!((check_saturation() - 28.324_190_418_452_80).abs() < 1e-9);
        assert_eq!(check_update_sp(&[]), Err(DecodeError::EmptyCheckInput));
    }

    #[test]
    fn logsp_check_examples() {
        let (m1, s1) = logsp_transform(2.0, LLR_CLAMP);
        let (m2, s2) = logsp_transform(-2.0, LLR_CLAMP);
        let v = check_update_logsp(&[m1, m2], &[s1, s2]).unwrap();
        assert!((v - check_update_sp(&[2.0, -2.0]).unwrap()).abs() < 1e-9);
        let (ma, sa) = logsp_transform(1.5, LLR_CLAMP);
        let (mb, sb) = logsp_transform(0.3, LLR_CLAMP);
        assert!(check_update_logsp(&[ma, mb], &[sa, sb]).unwrap() > 0.0);
        // near-zero magnitudes stay finite
        let (m0, s0) = logsp_transform(0.0, LLR_CLAMP);
        assert!(m0.is_finite() && m0 <= LLR_CLAMP);
        let v = check_update_logsp(&[m0, m0], &[s0, s0]).unwrap();
        assert!(v.is_finite());
        let v = check_update_logsp(&[1e-300, 1e-300], &[1.0, -1.0]).unwrap();
        assert!(v.is_finite() && v <= 0.0 && v >= -LLR_CLAMP);
        assert_eq!(check_update_logsp(&[], &[]), Err(DecodeError::EmptyCheckInput));
    }

    #[test]
    fn phi_is_involutive() {
        for x in [0.01, 0.5, 1.0, 3.0, 10.0, 25.0, 30.0] {
            assert!((phi(phi(x, LLR_CLAMP), LLR_CLAMP) - x).abs() < 1e-12 * x.max(1.0), "{x}");
        }
        // -ln(tanh(1)) by direct evaluation
        assert!((phi(2.0, LLR_CLAMP) - 0.272_341_468_911_831_6).abs() < 1e-15);
    }

    #[test]
    fn ms_check_examples() {
        assert_eq!(check_update_ms(&[2.0, -3.0], 1.0).unwrap(), -2.0);
        assert!((check_update_ms(&[2.0, -3.0], 0.8).unwrap() - -1.6).abs() < 1e-15);
        assert_eq!(check_update_ms(&[5.0], 1.0).unwrap(), 5.0);
        assert_eq!(check_update_ms(&[], 1.0), Err(DecodeError::EmptyCheckInput));
    }

    #[test]
    fn var_update_examples() {
        assert_eq!(var_update(1.0, &[]), 1.0);
        assert_eq!(var_update(1.0, &[0.5, -0.25]), 1.25);
        assert_eq!(var_update(0.0, &[2.5, -2.5]), 0.0);
        assert_eq!(var_update(29.0, &[5.0]), LLR_CLAMP);
    }

    #[test]
    fn posterior_examples() {
        // two variables, each in one degree-2 check with a third variable
        let code = ParityCheckCode::from_rows(3, vec![vec![0, 2], vec![1, 2]]).unwrap();
        let mut msgs = EdgeMessages::zeros(code.n_edges());
        // beta column sums +2 on variable 0, -2 on variable 1
        msgs.beta[code.var_edges(0)[0]] = 2.0;
        msgs.beta[code.var_edges(1)[0]] = -2.0;
        let r = LlrBlock(vec![-1.0, 1.0, 0.0]);
        let (lambda, bits) = posterior_decide(&r, &msgs, &code);
        assert_eq!(lambda, vec![1.0, -1.0, 0.0]);
        // lambda = 0 decides bit 0 (symbol +1)
        assert_eq!(bits.0, vec![0, 1, 0]);

        let zero = EdgeMessages::zeros(code.n_edges());
        let (_, bits) = posterior_decide(&r, &zero, &code);
        assert_eq!(bits, r.hard_decision());
    }

    #[test]
    fn noiseless_frame_takes_zero_iterations() {
        let code = small();
        // codeword 111 -> symbols -1
        let llr = LlrBlock(vec![-30.0; 3]);
        for alg in [BpAlgorithm::Sp, BpAlgorithm::LogSp, BpAlgorithm::Ms, BpAlgorithm::Mms] {
            let out = run_bp(&code, &llr, BpParams::new(alg)).unwrap();
            assert!(out.converged);
            assert_eq!(out.iterations, 0);
            assert_eq!(out.bits.0, vec![1, 1, 1]);
        }
    }

    #[test]
    fn corrects_a_weak_error() {
        let code = small();
        // all-zero codeword, middle bit weakly wrong
        let llr = LlrBlock(vec![4.0, -0.5, 3.0]);
        for alg in [BpAlgorithm::Sp, BpAlgorithm::LogSp, BpAlgorithm::Ms, BpAlgorithm::Mms] {
            let out = run_bp(&code, &llr, BpParams::new(alg)).unwrap();
            assert!(out.converged, "{alg:?}");
            assert_eq!(out.iterations, 1);
            assert_eq!(out.bits.0, vec![0, 0, 0]);
        }
    }

    #[test]
    fn rejects_bad_params_and_inputs() {
        let code = small();
        let mut p = BpParams::new(BpAlgorithm::Mms);
        p.delta = 1.5;
        assert!(BpDecoder::new(&code, p).is_err());
        p.delta = 0.0;
        assert!(BpDecoder::new(&code, p).is_err());
        let mut p = BpParams::new(BpAlgorithm::Sp);
        p.max_iterations = 0;
        assert!(BpDecoder::new(&code, p).is_err());
        let p = BpParams::new(BpAlgorithm::Sp);
        assert_eq!(
            run_bp(&code, &LlrBlock(vec![1.0; 2]), p),
            Err(DecodeError::LengthMismatch {
                expected: 3,
                got: 2
            })
        );
        assert_eq!(
            run_bp(&code, &LlrBlock(vec![1.0, f64::NAN, 1.0]), p),
            Err(DecodeError::NonFiniteLlr(1))
        );
        let eye = ParityCheckCode::from_dense(2, 2, &[1, 0, 0, 1]).unwrap();
        assert_eq!(
            BpDecoder::new(&eye, p).err(),
            Some(DecodeError::DegenerateCheck(0))
        );
    }

    #[test]
    fn check_pass_matches_scalar_rules() {
        // one check of degree 4 plus one of degree 2
        let code = ParityCheckCode::from_rows(5, vec![vec![0, 1, 2, 3], vec![3, 4]]).unwrap();
        let alphas = [1.3, -0.4, 2.2, -5.0, 0.9];
        for alg in [BpAlgorithm::Sp, BpAlgorithm::LogSp, BpAlgorithm::Ms, BpAlgorithm::Mms] {
            let mut dec = BpDecoder::new(&code, BpParams::new(alg)).unwrap();
            for e in 0..code.n_edges() {
                let v = alphas[code.edge_var(e)];
                dec.msgs.alpha[e] = match alg {
                    BpAlgorithm::LogSp => {
                        let (m, s) = logsp_transform(v, LLR_CLAMP);
                        s * m
                    }
                    _ => v,
                };
            }
            dec.check_pass(&mut Tally::new(false));
            for m in 0..code.n_checks() {
                for (j, e) in code.check_edges(m).enumerate() {
                    let others: Vec<f64> = code
                        .row(m)
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| i != j)
                        .map(|(_, &n)| alphas[n])
                        .collect();
                    let expected = match alg {
                        BpAlgorithm::Sp => check_update_sp(&others).unwrap(),
                        BpAlgorithm::LogSp => {
                            let (mags, signs): (Vec<f64>, Vec<f64>) = others
                                .iter()
                                .map(|&v| logsp_transform(v, LLR_CLAMP))
                                .unzip();
                            check_update_logsp(&mags, &signs).unwrap()
                        }
                        BpAlgorithm::Ms => check_update_ms(&others, 1.0).unwrap(),
                        BpAlgorithm::Mms => check_update_ms(&others, 0.8).unwrap(),
                    };
                    assert_eq!(dec.msgs.beta[e], expected, "{alg:?} edge {e}");
                }
            }
        }
    }
}
