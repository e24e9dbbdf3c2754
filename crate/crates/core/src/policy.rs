//! Algorithm diversity: pick the best decoder per SNR, and trade transmit SNR
//! against receiver energy.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::harness::SweepResult;
use crate::metrics::{self, CostModel, MetricsError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolicyError {
    #[error("curves are empty")]
    Empty,
    #[error("curve {algo:?} has {got} points, grid has {expected}")]
    GridMismatch {
        algo: String,
        expected: usize,
        got: usize,
    },
    #[error("SNR grid must be strictly increasing and finite")]
    BadGrid,
    #[error("curve {algo:?} at {snr_db} dB: invalid value {value}")]
    BadValue { algo: String, snr_db: f64, value: f64 },
    #[error("SNR {snr_db} dB outside policy range [{lo}, {hi}]")]
    OutOfRange { snr_db: f64, lo: f64, hi: f64 },
    #[error("expected {expected:?} curves, got {got:?}")]
    WrongKind { expected: MetricKind, got: MetricKind },
    #[error("budget must be positive, got {0}")]
    BadBudget(f64),
    #[error("infeasible budget {budget_j} J: minimum energy is {min_energy_j} J ({algorithm} at {snr_db} dB)")]
    Infeasible {
        budget_j: f64,
        min_energy_j: f64,
        snr_db: f64,
        algorithm: String,
    },
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    /// Joules per frame; lower is better.
    Energy,
    /// Decoded bits per second; higher is better.
    Rate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Minimize,
    Maximize,
}

impl MetricKind {
    pub fn direction(self) -> Direction {
        match self {
            MetricKind::Energy => Direction::Minimize,
            MetricKind::Rate => Direction::Maximize,
        }
    }
}

/// Where a set of curves came from.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// Spec hash of the sweep, or a free-form tag.
    pub sweep: String,
    /// Cost model source line, if any.
    pub cost_model: String,
}

/// One metric per algorithm over a shared SNR grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCurves")]
pub struct MetricCurves {
    pub kind: MetricKind,
    pub grid_db: Vec<f64>,
    pub curves: BTreeMap<String, Vec<f64>>,
    #[serde(default)]
    pub provenance: Provenance,
}

#[derive(Deserialize)]
struct RawCurves {
    kind: MetricKind,
    grid_db: Vec<f64>,
    curves: BTreeMap<String, Vec<f64>>,
    #[serde(default)]
    provenance: Provenance,
}

impl TryFrom<RawCurves> for MetricCurves {
    type Error = PolicyError;

    fn try_from(r: RawCurves) -> Result<Self, PolicyError> {
        MetricCurves::new(r.kind, r.grid_db, r.curves, r.provenance)
    }
}

impl MetricCurves {
    pub fn new(
        kind: MetricKind,
        grid_db: Vec<f64>,
        curves: BTreeMap<String, Vec<f64>>,
        provenance: Provenance,
    ) -> Result<Self, PolicyError> {
        if grid_db.is_empty() || curves.is_empty() {
            return Err(PolicyError::Empty);
        }
        if grid_db.iter().any(|s| !s.is_finite()) || grid_db.windows(2).any(|w| w[0] >= w[1]) {
            return Err(PolicyError::BadGrid);
        }
        for (algo, vals) in &curves {
            if vals.len() != grid_db.len() {
                return Err(PolicyError::GridMismatch {
                    algo: algo.clone(),
                    expected: grid_db.len(),
                    got: vals.len(),
                });
            }
            // Zero energy is legitimate: every frame arrived clean.
            if let Some((i, &v)) = vals.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
                return Err(PolicyError::BadValue {
                    algo: algo.clone(),
                    snr_db: grid_db[i],
                    value: v,
                });
            }
        }
        Ok(MetricCurves {
            kind,
            grid_db,
            curves,
            provenance,
        })
    }

    /// Builds curves from `(algo, [(snr_db, value)])` lists sharing one grid.
    pub fn from_points<'a, I>(kind: MetricKind, points: I) -> Result<Self, PolicyError>
    where
        I: IntoIterator<Item = (&'a str, Vec<(f64, f64)>)>,
    {
        let mut grid: Option<Vec<f64>> = None;
        let mut curves = BTreeMap::new();
        for (algo, pts) in points {
            let g: Vec<f64> = pts.iter().map(|p| p.0).collect();
            match &grid {
                None => grid = Some(g),
                Some(existing) if *existing != g => {
                    return Err(PolicyError::GridMismatch {
                        algo: algo.to_string(),
                        expected: existing.len(),
                        got: g.len(),
                    })
                }
                _ => {}
            }
            curves.insert(algo.to_string(), pts.iter().map(|p| p.1).collect());
        }
        Self::new(kind, grid.unwrap_or_default(), curves, Provenance::default())
    }

    /// Energy per frame: cost coefficient times mean iterations at each grid point.
    pub fn energy_from_sweep(result: &SweepResult, cost: &CostModel) -> Result<Self, PolicyError> {
        let profile = result.iteration_profile();
        let grid = result.spec.snr_grid_db.clone();
        let mut curves = BTreeMap::new();
        for algo in result.labels() {
            let vals = grid
                .iter()
                .map(|&s| metrics::estimate_energy(cost, &profile, &algo, s))
                .collect::<Result<Vec<_>, _>>()?;
            curves.insert(algo, vals);
        }
        Self::new(MetricKind::Energy, grid, curves, provenance(result, cost))
    }

    /// Decoding rate in bit/s with `bit_length` information bits per frame.
    /// A mean below one iteration is charged as one, since even a clean frame
    /// costs a syndrome evaluation.
    pub fn rate_from_sweep(
        result: &SweepResult,
        cost: &CostModel,
        freq_hz: f64,
        bit_length: u64,
    ) -> Result<Self, PolicyError> {
        let grid = result.spec.snr_grid_db.clone();
        let mut curves = BTreeMap::new();
        for algo in result.labels() {
            let entry = cost.get(&algo)?;
            let vals = grid
                .iter()
                .map(|&s| {
                    let c = result.cell(&algo, s).expect("sweep has every cell");
                    metrics::decoding_rate(freq_hz, entry.cycles_per_iter, c.mean_iters.max(1.0), bit_length, c.ber)
                })
                .collect::<Result<Vec<_>, _>>()?;
            curves.insert(algo, vals);
        }
        Self::new(MetricKind::Rate, grid, curves, provenance(result, cost))
    }

    pub fn algorithms(&self) -> impl Iterator<Item = &str> {
        self.curves.keys().map(String::as_str)
    }

    /// Multiplies every value by `k > 0`.
    pub fn scaled(&self, k: f64) -> Self {
        let mut out = self.clone();
        for v in out.curves.values_mut().flatten() {
            *v *= k;
        }
        out
    }

    /// Best algorithm at grid index `i`; ties go to the lowest name.
    pub fn argopt(&self, i: usize) -> (&str, f64) {
        let dir = self.kind.direction();
        let mut best: Option<(&str, f64)> = None;
        for (algo, vals) in &self.curves {
            let v = vals[i];
            let better = match (best, dir) {
                (None, _) => true,
                (Some((_, b)), Direction::Minimize) => v < b,
                (Some((_, b)), Direction::Maximize) => v > b,
            };
            if better {
                best = Some((algo, v));
            }
        }
        best.expect("curves are non-empty")
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("curves serialize");
        s.push('\n');
        s
    }
}

fn provenance(result: &SweepResult, cost: &CostModel) -> Provenance {
    Provenance {
        sweep: result.metadata.spec_sha256.clone(),
        cost_model: cost.source.clone().unwrap_or_default(),
    }
}

/// Algorithm chosen on `[start_db, end_db)`; the last interval is closed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub start_db: f64,
    pub end_db: f64,
    pub algorithm: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyTable {
    pub kind: MetricKind,
    pub direction: Direction,
    pub intervals: Vec<Interval>,
}

impl PolicyTable {
    pub fn range(&self) -> (f64, f64) {
        (self.intervals[0].start_db, self.intervals[self.intervals.len() - 1].end_db)
    }

    /// Interval start points after the first.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.intervals[1..].iter().map(|i| i.start_db).collect()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("policy serializes");
        s.push('\n');
        s
    }
}

/// Per grid point argopt, with runs of the same choice merged.
pub fn build_policy(curves: &MetricCurves) -> PolicyTable {
    let grid = &curves.grid_db;
    let mut intervals: Vec<Interval> = Vec::new();
    for (i, &s) in grid.iter().enumerate() {
        let (algo, _) = curves.argopt(i);
        match intervals.last_mut() {
            Some(last) if last.algorithm == algo => {}
            _ => intervals.push(Interval {
                start_db: s,
                end_db: s,
                algorithm: algo.to_string(),
            }),
        }
    }
    let last = grid[grid.len() - 1];
    for k in 0..intervals.len() {
        intervals[k].end_db = intervals.get(k + 1).map_or(last, |n| n.start_db);
    }
    PolicyTable {
        kind: curves.kind,
        direction: curves.kind.direction(),
        intervals,
    }
}

/// Algorithm for `snr_db`; a breakpoint belongs to the interval it starts.
pub fn select_algorithm(policy: &PolicyTable, snr_db: f64) -> Result<&str, PolicyError> {
    let (lo, hi) = policy.range();
    if !(snr_db >= lo && snr_db <= hi) {
        return Err(PolicyError::OutOfRange { snr_db, lo, hi });
    }
    let k = policy.intervals.partition_point(|i| i.start_db <= snr_db);
    Ok(&policy.intervals[k - 1].algorithm)
}

/// An SNR and the decoder to run there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    pub snr_db: f64,
    pub algorithm: String,
    pub energy_j: f64,
}

/// Lowest grid SNR whose cheapest decoder fits `budget_j`.
pub fn joint_manage(curves: &MetricCurves, budget_j: f64) -> Result<OperatingPoint, PolicyError> {
    if curves.kind != MetricKind::Energy {
        return Err(PolicyError::WrongKind {
            expected: MetricKind::Energy,
            got: curves.kind,
        });
    }
    if !(budget_j > 0.0 && budget_j.is_finite()) {
        return Err(PolicyError::BadBudget(budget_j));
    }
    let mut global: Option<OperatingPoint> = None;
    for (i, &s) in curves.grid_db.iter().enumerate() {
        let (algo, e) = curves.argopt(i);
        if e <= budget_j {
            return Ok(OperatingPoint {
                snr_db: s,
                algorithm: algo.to_string(),
                energy_j: e,
            });
        }
        if global.as_ref().is_none_or(|g| e < g.energy_j) {
            global = Some(OperatingPoint {
                snr_db: s,
                algorithm: algo.to_string(),
                energy_j: e,
            });
        }
    }
    let g = global.expect("grid is non-empty");
    Err(PolicyError::Infeasible {
        budget_j,
        min_energy_j: g.energy_j,
        snr_db: g.snr_db,
        algorithm: g.algorithm,
    })
}
