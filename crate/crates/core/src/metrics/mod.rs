//! Complexity and cost accounting: operation counters, the per-iteration cost
//! model, iteration-scaled energy and decoding data rate.
//!
//! Energy for an algorithm at an SNR is its calibrated per-iteration energy
//! multiplied by the average iteration count measured at that SNR. The cost
//! coefficients come from an external calibration file; nothing here models a
//! processor.

pub mod ops;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decoder::{DecodeError, DecodeOutcome};
pub use ops::{OpCounters, OpCounts, Phase};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("algorithm {0:?} has no entry in the {1}")]
    MissingAlgorithm(String, &'static str),
    #[error("SNR {snr_db} dB outside profile range [{lo}, {hi}]")]
    SnrOutOfRange { snr_db: f64, lo: f64, hi: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Returns the operation counters of an instrumented decode.
pub fn count_ops(outcome: &DecodeOutcome) -> Result<OpCounters, DecodeError> {
    outcome.ops.ok_or(DecodeError::InstrumentationDisabled)
}

/// Per-iteration cost of one algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostEntry {
    pub energy_per_iter_j: f64,
    pub cycles_per_iter: f64,
}

/// Externally calibrated per-iteration energy and cycle costs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    pub entries: BTreeMap<String, CostEntry>,
    pub source: Option<String>,
    pub processor: Option<String>,
}

impl CostModel {
    pub fn get(&self, algo: &str) -> Result<&CostEntry, MetricsError> {
        self.entries
            .get(algo)
            .ok_or_else(|| MetricsError::MissingAlgorithm(algo.to_string(), "cost model"))
    }

    pub fn insert(&mut self, algo: &str, energy_per_iter_j: f64, cycles_per_iter: f64) -> Result<(), MetricsError> {
        for (what, v) in [("energy_per_iter_j", energy_per_iter_j), ("cycles_per_iter", cycles_per_iter)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(MetricsError::InvalidArgument(format!(
                    "{algo}: {what} must be positive, got {v}"
                )));
            }
        }
        self.entries.insert(
            algo.to_string(),
            CostEntry {
                energy_per_iter_j,
                cycles_per_iter,
            },
        );
        Ok(())
    }

    /// Writes the model in the line format read by [`load_cost_model`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(s) = &self.source {
            out.push_str(&format!("source={s}\n"));
        }
        if let Some(p) = &self.processor {
            out.push_str(&format!("processor={p}\n"));
        }
        for (algo, e) in &self.entries {
            out.push_str(&format!(
                "algo={algo} energy_per_iter_j={} cycles_per_iter={}\n",
                e.energy_per_iter_j, e.cycles_per_iter
            ));
        }
        out
    }
}

/// Parses a cost-model file.
///
/// One record per line: `algo=<name> energy_per_iter_j=<real> cycles_per_iter=<real>`.
/// Lines `source=<text>` and `processor=<text>` set metadata. `#` starts a
/// comment.
pub fn load_cost_model(text: &str) -> Result<CostModel, MetricsError> {
    let mut model = CostModel::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let err = |reason: String| MetricsError::Parse { line, reason };
        if let Some(v) = body.strip_prefix("source=") {
            model.source = Some(v.trim().to_string());
            continue;
        }
        if let Some(v) = body.strip_prefix("processor=") {
            model.processor = Some(v.trim().to_string());
            continue;
        }
        let mut algo = None;
        let mut energy = None;
        let mut cycles = None;
        for token in body.split_whitespace() {
            let (k, v) = token
                .split_once('=')
                .ok_or_else(|| err(format!("expected key=value, found {token:?}")))?;
            let real = || {
                v.parse::<f64>()
                    .map_err(|_| err(format!("bad number {v:?} for {k}")))
            };
            match k {
                "algo" => algo = Some(v.to_string()),
                "energy_per_iter_j" => energy = Some(real()?),
                "cycles_per_iter" => cycles = Some(real()?),
                _ => return Err(err(format!("unknown key {k:?}"))),
            }
        }
        let algo = algo.ok_or_else(|| err("missing algo=".into()))?;
        let energy = energy.ok_or_else(|| err("missing energy_per_iter_j=".into()))?;
        let cycles = cycles.ok_or_else(|| err("missing cycles_per_iter=".into()))?;
        if model.entries.contains_key(&algo) {
            return Err(err(format!("duplicate entry for {algo}")));
        }
        model
            .insert(&algo, energy, cycles)
            .map_err(|e| err(e.to_string()))?;
    }
    Ok(model)
}

/// Average iterations per algorithm over an SNR grid.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IterationProfile {
    /// algorithm -> (snr_db, mean iterations), sorted by SNR.
    pub curves: BTreeMap<String, Vec<(f64, f64)>>,
}

impl IterationProfile {
    pub fn insert(&mut self, algo: &str, snr_db: f64, mean_iterations: f64) {
        let curve = self.curves.entry(algo.to_string()).or_default();
        match curve.binary_search_by(|(s, _)| s.total_cmp(&snr_db)) {
            Ok(i) => curve[i].1 = mean_iterations,
            Err(i) => curve.insert(i, (snr_db, mean_iterations)),
        }
    }

    /// Mean iterations at `snr_db`, linearly interpolated between grid points.
    pub fn mean_iterations(&self, algo: &str, snr_db: f64) -> Result<f64, MetricsError> {
        let curve = self
            .curves
            .get(algo)
            .filter(|c| !c.is_empty())
            .ok_or_else(|| MetricsError::MissingAlgorithm(algo.to_string(), "iteration profile"))?;
        interpolate(curve, snr_db)
    }
}

/// Piecewise-linear lookup on a sorted grid; no extrapolation.
pub(crate) fn interpolate(curve: &[(f64, f64)], x: f64) -> Result<f64, MetricsError> {
    let (lo, hi) = (curve[0].0, curve[curve.len() - 1].0);
    if !(x >= lo && x <= hi) {
        return Err(MetricsError::SnrOutOfRange { snr_db: x, lo, hi });
    }
    let i = curve.partition_point(|&(s, _)| s < x);
    let (s1, v1) = curve[i];
    if s1 == x || i == 0 {
        return Ok(v1);
    }
    let (s0, v0) = curve[i - 1];
    let t = (x - s0) / (s1 - s0);
    Ok(v0 + t * (v1 - v0))
}

/// Energy in joules: per-iteration energy times average iterations at `snr_db`.
pub fn estimate_energy(
    cost: &CostModel,
    profile: &IterationProfile,
    algo: &str,
    snr_db: f64,
) -> Result<f64, MetricsError> {
    let entry = cost.get(algo)?;
    let iters = profile.mean_iterations(algo, snr_db)?;
    Ok(entry.energy_per_iter_j * iters)
}

/// Decoded information bits per second:
/// `freq / (cycles_per_iteration * iterations) * bit_length * (1 - ber)`.
pub fn decoding_rate(
    freq_hz: f64,
    cycles_per_iteration: f64,
    iterations: f64,
    bit_length: u64,
    ber: f64,
) -> Result<f64, MetricsError> {
    for (what, v) in [
        ("frequency", freq_hz),
        ("cycles per iteration", cycles_per_iteration),
        ("iterations", iterations),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(MetricsError::InvalidArgument(format!(
                "{what} must be positive, got {v}"
            )));
        }
    }
    if !(0.0..=1.0).contains(&ber) {
        return Err(MetricsError::InvalidArgument(format!(
            "ber must be in [0, 1], got {ber}"
        )));
    }
    Ok(freq_hz / (cycles_per_iteration * iterations) * bit_length as f64 * (1.0 - ber))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_examples() {
        assert_eq!(decoding_rate(600e6, 1e5, 10.0, 64, 0.0).unwrap(), 38_400.0);
        assert_eq!(decoding_rate(600e6, 1e5, 10.0, 64, 1.0).unwrap(), 0.0);
        assert_eq!(decoding_rate(600e6, 1e5, 10.0, 64, 0.5).unwrap(), 19_200.0);
        assert!(decoding_rate(0.0, 1e5, 10.0, 64, 0.0).is_err());
        assert!(decoding_rate(600e6, 0.0, 10.0, 64, 0.0).is_err());
        assert!(decoding_rate(600e6, 1e5, 0.0, 64, 0.0).is_err());
        assert!(decoding_rate(600e6, 1e5, 10.0, 64, 1.5).is_err());
    }

    #[test]
    fn cost_model_parse() {
        let text = "# calibrated offline\nsource=bench run 3\nalgo=sp energy_per_iter_j=0.006 cycles_per_iter=120000\n\nalgo=ms energy_per_iter_j=0.002 cycles_per_iter=40000 # cheap\n";
        let m = load_cost_model(text).unwrap();
        assert_eq!(m.get("sp").unwrap().energy_per_iter_j, 0.006);
        assert_eq!(m.get("ms").unwrap().energy_per_iter_j, 0.002);
        assert_eq!(m.get("ms").unwrap().cycles_per_iter, 40000.0);
        assert_eq!(m.source.as_deref(), Some("bench run 3"));
        assert_eq!(load_cost_model(&m.to_text()).unwrap(), m);
        assert!(matches!(m.get("wbf"), Err(MetricsError::MissingAlgorithm(..))));
    }

    #[test]
    fn cost_model_rejects_bad_input() {
        let neg = "algo=sp energy_per_iter_j=-0.1 cycles_per_iter=10\n";
        assert!(matches!(load_cost_model(neg), Err(MetricsError::Parse { line: 1, .. })));
        let missing = "\nalgo=sp energy_per_iter_j=0.1\n";
        assert!(matches!(load_cost_model(missing), Err(MetricsError::Parse { line: 2, .. })));
        assert!(load_cost_model("algo=sp energy_per_iter_j=x cycles_per_iter=1").is_err());
        assert!(load_cost_model("algo=sp bogus=1").is_err());
        assert_eq!(load_cost_model("").unwrap(), CostModel::default());
    }

    fn profile() -> IterationProfile {
        let mut p = IterationProfile::default();
        p.insert("a", 1.0, 50.0);
        p.insert("a", 3.0, 10.0);
        p.insert("a", 2.0, 20.0);
        p
    }

    #[test]
    fn energy_examples() {
        let mut cost = CostModel::default();
        cost.insert("a", 0.001, 1.0).unwrap();
        let p = profile();
        assert!((estimate_energy(&cost, &p, "a", 1.0).unwrap() - 0.05).abs() < 1e-15);
        // halfway between 20 and 10 iterations
        assert!((estimate_energy(&cost, &p, "a", 2.5).unwrap() - 0.015).abs() < 1e-15);
        assert!(matches!(
            estimate_energy(&cost, &p, "a", 3.5),
            Err(MetricsError::SnrOutOfRange { .. })
        ));
        assert!(estimate_energy(&cost, &p, "b", 1.0).is_err());
        let mut zero = IterationProfile::default();
        zero.insert("a", 4.0, 0.0);
        assert_eq!(estimate_energy(&cost, &zero, "a", 4.0).unwrap(), 0.0);
    }

    #[test]
    fn energy_is_linear_in_coefficient() {
        let p = profile();
        let mut c1 = CostModel::default();
        c1.insert("a", 0.003, 1.0).unwrap();
        let mut c2 = CostModel::default();
        c2.insert("a", 0.006, 1.0).unwrap();
        for snr in [1.0, 1.5, 2.0, 3.0] {
            let e1 = estimate_energy(&c1, &p, "a", snr).unwrap();
            let e2 = estimate_energy(&c2, &p, "a", snr).unwrap();
            assert_eq!(e2, 2.0 * e1);
        }
    }
}
