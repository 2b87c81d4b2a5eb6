use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use nmdistill::harness::io::{matrix_to_json, read_json, read_operator, read_pair, write_json};
use nmdistill::harness::{
    run_sweep, sample_ensemble, to_json_string, write_sweep_outputs, EnsembleKind, EnsembleSpec, PairJson, PairsFile,
    SweepConfig,
};
use nmdistill::saturation::saturation_gap;
use nmdistill::{
    classify_regime, computational_pair, construct_saturating_map, intermediate_map, model_channels, optimize,
    saturation_feasible, DilationDims, DistillationInstance64, Error, HermitianOperator64, OptimizerConfig, Result,
};

#[derive(Parser)]
#[command(name = "nmdistill", version, about = "Multi-copy distillation of non-Markovianity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the two-step evolution as MARKOVIAN, WEAK or ESSENTIAL.
    Classify(ClassifyArgs),
    /// Maximize the distilled distinguishability change for one instance.
    Optimize(OptimizeArgs),
    /// Decide whether a CPTP map can saturate the trace-norm inequality for (A, B).
    CheckSaturation(SaturationArgs),
    /// Run an ensemble sweep and write records, heatmaps and metadata.
    Sweep(SweepArgs),
    /// Sample an ensemble of state pairs.
    Sample(SampleArgs),
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long, conflicts_with = "grid", required_unless_present = "grid", allow_negative_numbers = true)]
    epsilon: Option<f64>,
    /// Inclusive uniform grid `start:stop:count`.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct OptimizeArgs {
    #[arg(long)]
    epsilon: f64,
    #[arg(long)]
    n: usize,
    /// JSON pair file, pairs file, or `builtin:computational`.
    #[arg(long, default_value = "builtin:computational")]
    pair: String,
    /// Pair to use when `--pair` is a pairs file.
    #[arg(long, default_value_t = 0)]
    pair_index: usize,
    /// Optimizer config JSON; missing fields take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    dim_r: usize,
    #[arg(long, default_value_t = 2)]
    dim_d: usize,
}

#[derive(Args)]
struct SaturationArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    /// Also build the saturating measurement map when feasible.
    #[arg(long)]
    construct: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "sweep_out")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct SampleArgs {
    /// mixed, pure or ortho.
    #[arg(long)]
    kind: EnsembleKind,
    #[arg(long)]
    n_pairs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidArgument(format!("grid must be start:stop:count, got '{spec}'"));
    let parts: Vec<&str> = spec.split(':').collect();
    let [start, stop, count] = parts[..] else {
        return Err(bad());
    };
    let start: f64 = start.trim().parse().map_err(|_| bad())?;
    let stop: f64 = stop.trim().parse().map_err(|_| bad())?;
    let count: usize = count.trim().parse().map_err(|_| bad())?;
    match count {
        0 => Err(bad()),
        1 => Ok(vec![start]),
        _ => Ok((0..count)
            .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
            .collect()),
    }
}

#[derive(Serialize)]
struct ClassifyRow {
    epsilon: f64,
    regime: String,
    transfer_eigenvalues: Option<[f64; 3]>,
    is_positive: Option<bool>,
    is_cp: Option<bool>,
    choi_min_eigenvalue: Option<f64>,
    note: Option<String>,
}

fn classify_row(eps: f64) -> Result<ClassifyRow> {
    let (lam1, lam2) = model_channels(eps)?;
    Ok(match intermediate_map(&lam1, &lam2) {
        Ok(map) => ClassifyRow {
            epsilon: eps,
            regime: classify_regime(eps)?.to_string(),
            transfer_eigenvalues: Some(map.transfer_eigenvalues),
            is_positive: Some(map.is_positive),
            is_cp: Some(map.is_cp),
            choi_min_eigenvalue: Some(map.choi_min_eigenvalue),
            note: None,
        },
        Err(e @ Error::NonInvertible { .. }) => ClassifyRow {
            epsilon: eps,
            regime: "SINGULAR".into(),
            transfer_eigenvalues: None,
            is_positive: None,
            is_cp: None,
            choi_min_eigenvalue: None,
            note: Some(e.to_string()),
        },
        Err(e) => return Err(e),
    })
}

fn classify(args: ClassifyArgs) -> Result<()> {
    let grid = match (&args.grid, args.epsilon) {
        (Some(g), _) => parse_grid(g)?,
        (None, Some(e)) => vec![e],
        (None, None) => return Err(Error::InvalidArgument("--epsilon or --grid is required".into())),
    };
    let rows = grid.into_iter().map(classify_row).collect::<Result<Vec<_>>>()?;
    if args.json {
        print!("{}", to_json_string(&rows)?);
    } else {
        println!("{:>22}  {:<10}  {:>10}  {:>10}  {:>10}", "epsilon", "regime", "v_x", "v_y", "v_z");
        for r in rows {
            let [x, y, z] = r.transfer_eigenvalues.unwrap_or([f64::NAN; 3]);
            println!("{:>22}  {:<10}  {x:>10.6}  {y:>10.6}  {z:>10.6}", r.epsilon, r.regime);
        }
    }
    Ok(())
}

fn load_pair(spec: &str, index: usize) -> Result<(HermitianOperator64, HermitianOperator64)> {
    match spec.strip_prefix("builtin:") {
        Some("computational") => Ok(computational_pair()),
        Some(other) => Err(Error::InvalidArgument(format!("unknown builtin pair '{other}'"))),
        None => read_pair(Path::new(spec), index),
    }
}

fn run_optimize(args: OptimizeArgs) -> Result<()> {
    let config: OptimizerConfig = match &args.config {
        Some(p) => read_json(p)?,
        None => OptimizerConfig::default(),
    };
    let (rho1, rho2) = load_pair(&args.pair, args.pair_index)?;
    let dims = DilationDims::new(args.n, args.dim_r, args.dim_d)?;
    let instance = DistillationInstance64::for_model(args.epsilon, rho1, rho2, dims)?;
    let result = optimize(&instance, &config)?;
    let regime = classify_regime(args.epsilon).map_or("SINGULAR".to_string(), |r| r.to_string());
    let out = json!({
        "epsilon": args.epsilon,
        "n": args.n,
        "regime": regime,
        "delta_d": instance.delta_d,
        "beta": instance.bounds.beta,
        "beta_sharp": instance.bounds.beta_sharp,
        "config": config,
        "result": result,
    });
    print!("{}", to_json_string(&out)?);
    Ok(())
}

fn check_saturation(args: SaturationArgs) -> Result<()> {
    let a = read_operator(&args.a)?;
    let b = read_operator(&args.b)?;
    let report = saturation_feasible(&a, &b)?;
    let mut out = json!({
        "feasible": report.feasible,
        "margin": report.margin,
        "plus_overlap": report.plus_overlap,
        "near_degenerate": report.near_degenerate,
        "rank_plus": report.split.rank_plus(),
        "rank_minus": report.split.rank_minus(),
        "rank_zero": report.split.rank_zero(),
        "eigenvalues": report.split.eigenvalues,
        "witness_e0": report.witness_e0.as_ref().map(|e| matrix_to_json(e.matrix())),
    });
    if args.construct && report.feasible {
        let map = construct_saturating_map(&report, 2)?;
        let gap = saturation_gap(&map, &a, &b)?;
        out["saturating_map"] = json!({
            "effects": map.effects.iter().map(|e| matrix_to_json(e.matrix())).collect::<Vec<_>>(),
            "gap": gap,
        });
    }
    print!("{}", to_json_string(&out)?);
    Ok(())
}

fn sweep(args: SweepArgs) -> Result<()> {
    let config: SweepConfig = read_json(&args.config)?;
    let outcome = run_sweep(&config)?;
    let meta = write_sweep_outputs(&config, &outcome, &args.out_dir)?;
    let summary = json!({
        "out_dir": args.out_dir.display().to_string(),
        "records": outcome.records.len(),
        "failures": outcome.failures.len(),
        "config_hash": meta.context.config_hash,
        "permutation": meta.permutation,
        "files": meta.files,
        "export_errors": meta.export_errors,
    });
    print!("{}", to_json_string(&summary)?);
    Ok(())
}

fn sample(args: SampleArgs) -> Result<()> {
    let spec = EnsembleSpec {
        kind: args.kind,
        n_pairs: args.n_pairs,
        seed: args.seed,
    };
    if spec.n_pairs == 0 {
        return Err(Error::InvalidArgument("--n-pairs must be >= 1".into()));
    }
    let file = PairsFile {
        kind: spec.kind,
        seed: spec.seed,
        measure: spec.kind.measure().into(),
        pairs: sample_ensemble(&spec).iter().map(PairJson::from_pair).collect(),
    };
    match args.out {
        Some(p) => write_json(&file, &p),
        None => {
            print!("{}", to_json_string(&file)?);
            Ok(())
        }
    }
}

fn report_error(kind: &str, message: &str) {
    let err = json!({ "error": { "kind": kind, "message": message } });
    eprintln!("{err}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            report_error("usage", e.to_string().trim_end());
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        Command::Classify(a) => classify(a),
        Command::Optimize(a) => run_optimize(a),
        Command::CheckSaturation(a) => check_saturation(a),
        Command::Sweep(a) => sweep(a),
        Command::Sample(a) => sample(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            report_error(e.kind(), &e.to_string());
            ExitCode::FAILURE
        }
    }
}
