//! BPSK over AWGN and the channel log-likelihood ratios fed to every decoder.
//!
//! Noise comes from a ChaCha8 stream turned into Gaussians with the
//! Box-Muller transform ([`GAUSSIAN_METHOD`]). Both pieces are pinned so a
//! seed reproduces the same noise across releases.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::code::HardBits;

/// Identifier of the noise generator, recorded in result metadata.
pub const GAUSSIAN_METHOD: &str = "chacha8-box-muller-v1";

/// Magnitude used for channel LLRs when the noise is zero.
pub const NOISELESS_LLR: f64 = 30.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("noise standard deviation must be >= 0, got {0}")]
    NegativeSigma(f64),
    #[error("LLR needs sigma > 0, got {0}")]
    NonPositiveSigma(f64),
    #[error("code rate must be in (0, 1], got {0}")]
    RateOutOfRange(f64),
}

/// Transmitted symbols, received samples and the noise level that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolBlock {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub sigma: f64,
}

/// Per-bit channel log-likelihood ratios `log P(y|x=+1) / P(y|x=-1)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LlrBlock(pub Vec<f64>);

impl LlrBlock {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Hard decision: bit 0 when `r >= 0`, bit 1 otherwise.
    pub fn hard_decision(&self) -> HardBits {
        HardBits(self.0.iter().map(|&r| hard_bit(r)).collect())
    }
}

/// Bit carried by a soft value: `>= 0` maps to bit 0 (symbol +1).
#[inline]
pub fn hard_bit(v: f64) -> u8 {
    u8::from(v < 0.0)
}

/// Maps bit 0 to +1.0 and bit 1 to -1.0.
pub fn modulate_bpsk(bits: &HardBits) -> Vec<f64> {
    bits.0
        .iter()
        .map(|&b| if b == 0 { 1.0 } else { -1.0 })
        .collect()
}

/// Inverse of [`modulate_bpsk`] by sign.
pub fn demodulate_bpsk(y: &[f64]) -> HardBits {
    HardBits(y.iter().map(|&v| hard_bit(v)).collect())
}

/// Uniform double in (0, 1] from the top 53 bits of a word.
#[inline]
fn unit_open_closed(word: u64) -> f64 {
    ((word >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Fills `out` with independent standard normals drawn from `rng`.
///
/// Values come in Box-Muller pairs; an odd length discards the last sine term.
pub fn fill_standard_normal<R: RngCore>(rng: &mut R, out: &mut [f64]) {
    for pair in out.chunks_mut(2) {
        let u1 = unit_open_closed(rng.next_u64());
        let u2 = unit_open_closed(rng.next_u64());
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = std::f64::consts::TAU * u2;
        pair[0] = radius * angle.cos();
        if let Some(second) = pair.get_mut(1) {
            *second = radius * angle.sin();
        }
    }
}

/// Adds Gaussian noise of standard deviation `sigma` to `x`, drawing from `rng`.
pub fn awgn_with<R: RngCore>(x: &[f64], sigma: f64, rng: &mut R) -> Result<Vec<f64>, ChannelError> {
    if !(sigma >= 0.0) {
        return Err(ChannelError::NegativeSigma(sigma));
    }
    if sigma == 0.0 {
        return Ok(x.to_vec());
    }
    let mut noise = vec![0.0; x.len()];
    fill_standard_normal(rng, &mut noise);
    Ok(x.iter().zip(&noise).map(|(xi, g)| xi + sigma * g).collect())
}

/// Adds seeded Gaussian noise: identical `(x, sigma, seed)` gives identical output.
pub fn awgn(x: &[f64], sigma: f64, seed: u64) -> Result<Vec<f64>, ChannelError> {
    awgn_with(x, sigma, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// `r_n = 2 y_n / sigma^2`.
pub fn llr(y: &[f64], sigma: f64) -> Result<LlrBlock, ChannelError> {
    if !(sigma > 0.0) {
        return Err(ChannelError::NonPositiveSigma(sigma));
    }
    let scale = 2.0 / (sigma * sigma);
    Ok(LlrBlock(y.iter().map(|v| scale * v).collect()))
}

/// LLRs for a noiseless channel: sign of `y` at magnitude [`NOISELESS_LLR`].
pub fn noiseless_llr(y: &[f64]) -> LlrBlock {
    LlrBlock(
        y.iter()
            .map(|&v| if v >= 0.0 { NOISELESS_LLR } else { -NOISELESS_LLR })
            .collect(),
    )
}

/// Noise standard deviation for an Eb/N0 of `snr_db` at code rate `rate`
/// with unit-energy symbols: `sigma = sqrt(1 / (2 rate 10^(snr_db/10)))`.
pub fn snr_db_to_sigma(snr_db: f64, rate: f64) -> Result<f64, ChannelError> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(ChannelError::RateOutOfRange(rate));
    }
    let ebn0 = 10f64.powf(snr_db / 10.0);
    Ok((1.0 / (2.0 * rate * ebn0)).sqrt())
}
