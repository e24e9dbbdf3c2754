use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use ldpc_workbench::channel;
use ldpc_workbench::harness::{self, HarnessError, StoppingRule};
use ldpc_workbench::metrics::{self, MetricsError, Phase};
use ldpc_workbench::policy::{self, PolicyError};
use ldpc_workbench::{
    AlgoSpec, Algorithm, CodeError, CostModel, DecodeError, Decoder, DecoderConfig, LlrBlock, MetricCurves,
    ParityCheckCode, PolicyTable, SweepResult, SweepSpec, TANNER_155_ALIST,
};
use serde_json::json;

use crate::args::{parse_grid, Command, DecodeArgs, EnergyArgs, FileConfig, PolicyCommand, RateArgs, SweepArgs};
use crate::CliError;

const BUILTIN_TANNER: &str = "builtin:tanner155";

impl From<CodeError> for CliError {
    fn from(e: CodeError) -> Self {
        CliError::new("code", e.to_string())
    }
}

impl From<DecodeError> for CliError {
    fn from(e: DecodeError) -> Self {
        CliError::new("decode", e.to_string())
    }
}

impl From<MetricsError> for CliError {
    fn from(e: MetricsError) -> Self {
        CliError::new("cost-model", e.to_string())
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        let kind = match e {
            HarnessError::SchemaVersion { .. } | HarnessError::Format(_) => "schema",
            HarnessError::Io(_) => "io",
            HarnessError::InvalidSpec(_) => "usage",
            _ => "sweep",
        };
        CliError::new(kind, e.to_string())
    }
}

impl From<PolicyError> for CliError {
    fn from(e: PolicyError) -> Self {
        let kind = match e {
            PolicyError::Infeasible { .. } => "infeasible",
            _ => "policy",
        };
        CliError::new(kind, e.to_string())
    }
}

pub fn dispatch(cmd: Command, file: &FileConfig) -> Result<(), CliError> {
    match cmd {
        Command::Decode(a) => decode(a, file),
        Command::Sweep(a) => sweep(a, file),
        Command::Rate(a) => rate(a, file),
        Command::Energy(a) => energy(a, file),
        Command::Policy(p) => policy_cmd(p),
    }
}

fn echo(config: serde_json::Value) {
    eprintln!("config: {config}");
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn load_code(spec: &str) -> Result<ParityCheckCode, CliError> {
    if spec == BUILTIN_TANNER {
        return Ok(ParityCheckCode::from_alist(TANNER_155_ALIST)?);
    }
    let text = read(Path::new(spec))?;
    ParityCheckCode::from_alist(&text).map_err(|e| CliError::new("code", format!("{spec}: {e}")))
}

fn parse_algo(s: &str) -> Result<Algorithm, CliError> {
    s.parse().map_err(|e: String| CliError::new("usage", e))
}

fn load_cost(path: &Path) -> Result<CostModel, CliError> {
    metrics::load_cost_model(&read(path)?).map_err(|e| CliError::new("cost-model", format!("{}: {e}", path.display())))
}

fn load_results(path: &Path) -> Result<SweepResult, CliError> {
    SweepResult::from_json(&read(path)?).map_err(|e| CliError::from(e).context(&path.display().to_string()))
}

fn load_curves(path: &Path) -> Result<MetricCurves, CliError> {
    serde_json::from_str(&read(path)?).map_err(|e| CliError::new("schema", format!("{}: {e}", path.display())))
}

fn decode(a: DecodeArgs, file: &FileConfig) -> Result<(), CliError> {
    let code_id = a.code.or(file.code.clone()).ok_or_else(|| CliError::missing("code"))?;
    let algo = parse_algo(&a.algo.or(file.algo.clone()).unwrap_or_else(|| "sp".into()))?;
    let mut cfg = DecoderConfig::new(algo);
    if let Some(d) = a.delta.or(file.delta) {
        cfg.delta = d;
    }
    if let Some(b) = a.beta.or(file.beta) {
        cfg.beta_norm = b;
    }
    if let Some(n) = a.max_iters.or(file.max_iters) {
        cfg.max_iterations = n;
    }
    let code = load_code(&code_id)?;

    let (llr, source) = match &a.llr {
        Some(path) => {
            let values = read(path)?
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| CliError::new("parse", format!("{}: {e}", path.display())))?;
            (LlrBlock(values), json!({ "llr": path }))
        }
        None => {
            let snr_db = a.snr_db.ok_or_else(|| CliError::missing("snr-db (or --llr)"))?;
            let seed = a.seed.or(file.seed).unwrap_or(0);
            let sigma = channel::snr_db_to_sigma(snr_db, code.rate()).map_err(|e| CliError::new("usage", e.to_string()))?;
            let y = channel::awgn(&vec![1.0; code.n_vars()], sigma, seed).map_err(|e| CliError::new("usage", e.to_string()))?;
            let llr = channel::llr(&y, sigma).map_err(|e| CliError::new("usage", e.to_string()))?;
            (llr, json!({ "snr_db": snr_db, "sigma": sigma, "seed": seed, "noise": channel::GAUSSIAN_METHOD }))
        }
    };
    echo(json!({ "command": "decode", "code": code_id, "decoder": cfg, "input": source }));

    let mut dec = Decoder::new(&code, &cfg)?.instrumented(a.ops);
    let out = dec.decode(&llr)?;
    let errors_label = if a.llr.is_some() { "weight" } else { "bit_errors" };
    println!(
        "converged={} iterations={} {}={}",
        out.converged,
        out.iterations,
        errors_label,
        out.bits.weight()
    );
    if let Some(ops) = out.ops {
        for p in Phase::ALL {
            let c = ops.phase(p);
            println!(
                "ops phase={p:?} add={} mul={} div={} cmp={} sign={} tanh={} atanh={} log={}",
                c.add, c.mul, c.div, c.cmp, c.sign, c.tanh, c.atanh, c.log
            );
        }
    }
    Ok(())
}

/// `name` or `name@delta`.
fn parse_algo_list(list: &str) -> Result<Vec<AlgoSpec>, CliError> {
    list.split(',')
        .map(|tok| {
            let tok = tok.trim();
            let (name, delta) = match tok.split_once('@') {
                Some((n, d)) => {
                    let d: f64 = d
                        .parse()
                        .map_err(|_| CliError::new("usage", format!("bad delta in {tok:?}")))?;
                    (n, Some(d))
                }
                None => (tok, None),
            };
            let mut config = DecoderConfig::new(parse_algo(name)?);
            if let Some(d) = delta {
                config.delta = d;
            }
            Ok(AlgoSpec {
                label: tok.to_ascii_lowercase(),
                config,
            })
        })
        .collect()
}

fn sweep(a: SweepArgs, file: &FileConfig) -> Result<(), CliError> {
    let code_id = a.code.or(file.code.clone()).ok_or_else(|| CliError::missing("code"))?;
    let algos = a.algos.or(file.algos.clone()).ok_or_else(|| CliError::missing("algos"))?;
    let grid = a.snr.or(file.snr.clone()).ok_or_else(|| CliError::missing("snr"))?;
    let mut algorithms = parse_algo_list(&algos)?;
    for alg in &mut algorithms {
        if let Some(n) = a.max_iters.or(file.max_iters) {
            alg.config.max_iterations = n;
        }
        if let Some(b) = a.beta.or(file.beta) {
            alg.config.beta_norm = b;
        }
    }
    let mut spec = SweepSpec::new(&code_id, algorithms, parse_grid(&grid)?);
    spec.base_seed = a.seed.or(file.seed).unwrap_or(0);
    spec.paired = a.paired;
    spec.instrument = a.instrument;
    spec.stopping = match a.trials.or(file.trials) {
        Some(trials) => StoppingRule::FixedTrials { trials },
        None => {
            let StoppingRule::TargetErrors {
                frame_errors,
                min_trials,
                max_trials,
            } = StoppingRule::default()
            else {
                unreachable!()
            };
            StoppingRule::TargetErrors {
                frame_errors: a.target_errors.or(file.target_errors).unwrap_or(frame_errors),
                min_trials: a.min_trials.or(file.min_trials).unwrap_or(min_trials),
                max_trials: a.max_trials.or(file.max_trials).unwrap_or(max_trials),
            }
        }
    };
    let workers = a.workers.or(file.workers).unwrap_or(0);
    echo(json!({ "command": "sweep", "spec": spec, "workers": workers, "out": a.out, "csv": a.csv }));

    let code = load_code(&code_id)?;
    let result = harness::run_sweep(&code, &spec, workers)?;
    if let Some(p) = &a.csv {
        write(p, &result.to_csv())?;
    }
    match &a.out {
        Some(p) => {
            write(p, &result.to_json())?;
            print!("{}", result.to_csv());
        }
        None => print!("{}", result.to_json()),
    }
    Ok(())
}

fn energy(a: EnergyArgs, file: &FileConfig) -> Result<(), CliError> {
    let cost_path = a.cost.or(file.cost.clone()).ok_or_else(|| CliError::missing("cost"))?;
    echo(json!({ "command": "energy", "results": a.results, "cost": cost_path, "out": a.out }));
    let result = load_results(&a.results)?;
    let cost = load_cost(&cost_path)?;
    let curves = MetricCurves::energy_from_sweep(&result, &cost)?;

    let mut out = String::from("algo,snr_db,mean_iters,energy_per_iter_j,energy_j\n");
    for (algo, vals) in &curves.curves {
        let coeff = cost.get(algo)?.energy_per_iter_j;
        for (&s, &e) in curves.grid_db.iter().zip(vals) {
            let iters = result.cell(algo, s).map_or(f64::NAN, |c| c.mean_iters);
            let _ = writeln!(out, "{algo},{s},{iters},{coeff},{e}");
        }
    }
    print!("{out}");
    if let Some(p) = &a.out {
        write(p, &curves.to_json())?;
    }
    Ok(())
}

fn rate(a: RateArgs, file: &FileConfig) -> Result<(), CliError> {
    let cost_path = a.cost.or(file.cost.clone()).ok_or_else(|| CliError::missing("cost"))?;
    let freq = a.freq_hz.or(file.freq_hz).ok_or_else(|| CliError::missing("freq-hz"))?;
    let result = load_results(&a.results)?;
    let k = a
        .bit_length
        .unwrap_or_else(|| (result.metadata.rate * result.metadata.n_vars as f64).round() as u64);
    echo(json!({ "command": "rate", "results": a.results, "cost": cost_path, "freq_hz": freq, "bit_length": k, "out": a.out }));
    let cost = load_cost(&cost_path)?;
    let curves = MetricCurves::rate_from_sweep(&result, &cost, freq, k)?;

    let mut out = String::from("algo,snr_db,mean_iters,ber,cycles_per_iter,rate_bps\n");
    for (algo, vals) in &curves.curves {
        let cycles = cost.get(algo)?.cycles_per_iter;
        for (&s, &r) in curves.grid_db.iter().zip(vals) {
            let c = result.cell(algo, s).expect("sweep has every cell");
            let _ = writeln!(out, "{algo},{s},{},{},{cycles},{r}", c.mean_iters, c.ber);
        }
    }
    print!("{out}");
    if let Some(p) = &a.out {
        write(p, &curves.to_json())?;
    }
    Ok(())
}

fn print_policy(p: &PolicyTable) {
    println!("start_db,end_db,algorithm");
    for i in &p.intervals {
        println!("{},{},{}", i.start_db, i.end_db, i.algorithm);
    }
}

fn policy_cmd(cmd: PolicyCommand) -> Result<(), CliError> {
    match cmd {
        PolicyCommand::Build { curves, out } => {
            echo(json!({ "command": "policy build", "curves": curves, "out": out }));
            let table = policy::build_policy(&load_curves(&curves)?);
            print_policy(&table);
            if let Some(p) = &out {
                write(p, &table.to_json())?;
            }
        }
        PolicyCommand::Select { policy: path, curves, snr_db } => {
            echo(json!({ "command": "policy select", "policy": path, "curves": curves, "snr_db": snr_db }));
            let table = match (&path, &curves) {
                (Some(p), _) => serde_json::from_str::<PolicyTable>(&read(p)?)
                    .ok()
                    .filter(|t| !t.intervals.is_empty())
                    .ok_or_else(|| CliError::new("schema", format!("{}: not a policy table", p.display())))?,
                (None, Some(c)) => policy::build_policy(&load_curves(c)?),
                (None, None) => return Err(CliError::missing("policy")),
            };
            let algo = policy::select_algorithm(&table, snr_db)?;
            println!("snr_db={snr_db} algorithm={algo}");
        }
        PolicyCommand::Joint { curves, budget_j } => {
            echo(json!({ "command": "policy joint", "curves": curves, "budget_j": budget_j }));
            let op = policy::joint_manage(&load_curves(&curves)?, budget_j)?;
            println!("snr_db={} algorithm={} energy_j={}", op.snr_db, op.algorithm, op.energy_j);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algo_lists() {
        let v = parse_algo_list("sp, MMS@0.75,irrwbf").unwrap();
        assert_eq!(v.len(), 3);
        assert_eq!(v[1].label, "mms@0.75");
        assert_eq!(v[1].config.algorithm, Algorithm::Mms);
        assert_eq!(v[1].config.delta, 0.75);
        assert_eq!(v[2].config.delta, 0.0);
        assert!(parse_algo_list("sp,foo").is_err());
        assert!(parse_algo_list("mms@x").is_err());
    }

    #[test]
    fn one_line_errors() {
        let e = CliError::new("io", "a\nb  c");
        assert_eq!(e.to_string(), "error[io]: a b c");
    }
}
