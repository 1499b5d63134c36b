mod cache;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use specbound::bench::{
    prepare_output_dir, run_campaign, write_campaign, BenchConfig, CampaignOptions,
};
use specbound::calibration::{
    resolve_theta, theta_for_delta, CalibrationEntry, CalibrationTable, ThetaProvenance,
};
use specbound::operator::{
    frechet_expm_operator, gen_synthetic, hilbert_operator, load_matrix, save_matrix,
    FrechetMethod, ForwardOnly, MatrixFormat, SpectrumSpec,
};
use specbound::{dense_svd, estimate, make_dense_operator, Error, EstimatorKind, LinearOperator, RandomSource};

use cache::CalibrationCache;

#[derive(Parser)]
#[command(name = "specbound", version, about = "Randomized upper bounds on the spectral norm")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print theta for each estimator and failure probability.
    Calibrate(CalibrateArgs),
    /// One randomized upper bound for a matrix.
    Estimate(EstimateArgs),
    /// Run a benchmark campaign from a JSON config.
    Bench(BenchArgs),
    /// Write a random matrix with prescribed singular values.
    Gen(GenArgs),
}

fn parse_kind(s: &str) -> Result<EstimatorKind, String> {
    s.parse::<EstimatorKind>().map_err(|e| e.to_string())
}

#[derive(Args)]
struct CalibrateArgs {
    /// Failure probabilities, comma-separated.
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.05, 0.01, 0.001])]
    delta: Vec<f64>,
    /// Estimators, comma-separated (counterbalance, dixon, vanilla<k>).
    #[arg(long, value_delimiter = ',', value_parser = parse_kind,
          default_values = ["counterbalance", "vanilla3", "dixon"])]
    kind: Vec<EstimatorKind>,
    #[arg(long)]
    json: bool,
    /// Recompute instead of reading or writing the cache.
    #[arg(long)]
    no_cache: bool,
}

#[derive(Args)]
#[group(id = "source", required = true, multiple = false)]
struct Source {
    /// Classical Hilbert matrix of this order.
    #[arg(long, value_name = "N", group = "source")]
    hilbert: Option<usize>,
    /// Matrix file (.csv, otherwise binary).
    #[arg(long, group = "source")]
    file: Option<PathBuf>,
    /// Random matrix with these singular values, comma-separated.
    #[arg(long, value_name = "SV", value_delimiter = ',', group = "source")]
    synthetic: Option<Vec<f64>>,
    /// Derivative of the matrix exponential at an N x N matrix.
    #[arg(long, value_name = "N", group = "source")]
    frechet: Option<usize>,
}

#[derive(Args)]
struct EstimateArgs {
    #[command(flatten)]
    source: Source,
    /// Shape of a --synthetic matrix.
    #[arg(long, default_value = "100x100", value_parser = parse_shape)]
    shape: (usize, usize),
    /// Seed of the random factors of a --synthetic matrix.
    #[arg(long, default_value_t = 1)]
    gen_seed: u64,
    /// Diagonal scale of the --frechet base point.
    #[arg(long, default_value_t = -0.01, allow_hyphen_values = true)]
    frechet_scale: f64,
    #[arg(long, value_parser = parse_kind, default_value = "counterbalance")]
    kind: EstimatorKind,
    /// Number of vectors for vanilla.
    #[arg(long)]
    k: Option<u32>,
    /// Target failure probability; theta is calibrated from it.
    #[arg(long, default_value_t = 0.05, conflicts_with = "theta")]
    delta: f64,
    /// Use this theta instead of calibrating.
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    stream: u64,
    /// Hide transpose products from the estimator.
    #[arg(long)]
    no_adjoint: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct BenchArgs {
    config: PathBuf,
    /// Output directory.
    #[arg(long, short, default_value = "bench_out")]
    out: PathBuf,
    /// Use the config's full trial counts.
    #[arg(long)]
    full: bool,
    /// Overwrite a nonempty output directory.
    #[arg(long)]
    force: bool,
    /// Worker threads; 0 means one per logical core.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct GenArgs {
    /// Nonzero singular values, positive and nonincreasing.
    #[arg(long, value_delimiter = ',', required = true)]
    sv: Vec<f64>,
    #[arg(long, default_value = "100x100", value_parser = parse_shape)]
    shape: (usize, usize),
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output matrix; `.csv` selects CSV, anything else the binary format.
    #[arg(short, long)]
    out: PathBuf,
    #[arg(long)]
    json: bool,
}

fn parse_shape(s: &str) -> Result<(usize, usize), String> {
    let (r, c) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("shape must look like 100x100, got `{s}`"))?;
    let r = r.trim().parse().map_err(|_| format!("bad row count in `{s}`"))?;
    let c = c.trim().parse().map_err(|_| format!("bad column count in `{s}`"))?;
    Ok((r, c))
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::MissingAdjoint { .. } => 3,
        Error::DegenerateDraw { .. } | Error::DegenerateBatch { .. } => 4,
        Error::OutputExists { .. } => 5,
        Error::Io { .. } | Error::IntegrationFailure { .. } | Error::NoConvergence { .. } => 1,
        _ => 2,
    }
}

fn print_json<T: Serialize>(value: &T) -> specbound::Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

/// Counterbalance entries go through the cache; closed forms are cheap.
fn calibrated(cache: &mut CalibrationCache, kind: EstimatorKind, delta: f64) -> specbound::Result<CalibrationEntry> {
    if kind != EstimatorKind::Counterbalance {
        return theta_for_delta(kind, delta);
    }
    if let Some(e) = cache.get(kind, delta) {
        return Ok(e.clone());
    }
    let e = theta_for_delta(kind, delta)?;
    cache.insert(e.clone());
    Ok(e)
}

fn calibrate(args: &CalibrateArgs) -> specbound::Result<()> {
    let mut cache = CalibrationCache::open(!args.no_cache);
    let mut table = CalibrationTable::default();
    for &kind in &args.kind {
        for &delta in &args.delta {
            table.entries.push(calibrated(&mut cache, kind, delta)?);
        }
    }
    cache.save();
    if args.json {
        return print_json(&table);
    }
    println!("{:<16} {:>8} {:>10}  method", "kind", "delta", "theta");
    for e in &table.entries {
        println!("{:<16} {:>8} {:>10.4}  {}", e.kind.to_string(), e.delta, e.theta, e.method);
    }
    if let Some(p) = cache.path() {
        println!("cache: {}", p.display());
    }
    Ok(())
}

fn open_source(args: &EstimateArgs) -> specbound::Result<(Box<dyn LinearOperator>, String)> {
    let s = &args.source;
    let (op, label): (Box<dyn LinearOperator>, String) = if let Some(n) = s.hilbert {
        (Box::new(hilbert_operator(n)?), format!("hilbert({n})"))
    } else if let Some(path) = &s.file {
        let m = load_matrix(path, MatrixFormat::from_path(path))?;
        (Box::new(make_dense_operator(m)), path.display().to_string())
    } else if let Some(sv) = &s.synthetic {
        let spec = SpectrumSpec::new(sv.clone(), args.shape.0, args.shape.1)?;
        let (op, _) = gen_synthetic(&spec, args.gen_seed)?;
        (Box::new(op), format!("synthetic({}x{})", args.shape.0, args.shape.1))
    } else if let Some(n) = s.frechet {
        let mut op = frechet_expm_operator(n, args.frechet_scale)?;
        if op.is_self_adjoint() {
            op = op.with_method(FrechetMethod::Spectral)?;
        }
        (Box::new(op), format!("frechet({n})"))
    } else {
        return Err(Error::InvalidArgument("no matrix source given".into()));
    };
    if args.no_adjoint {
        return Ok((Box::new(ForwardOnly(op)), label));
    }
    Ok((op, label))
}

#[derive(Serialize)]
struct EstimateOutput {
    source: String,
    kind: EstimatorKind,
    value: f64,
    theta: f64,
    provenance: ThetaProvenance,
    delta: Option<f64>,
    matvec_count: usize,
    sequential_depth: usize,
    seed: u64,
    stream_id: u64,
}

fn run_estimate(args: &EstimateArgs) -> specbound::Result<()> {
    let kind = match (args.kind, args.k) {
        (EstimatorKind::Vanilla { .. }, Some(k)) => EstimatorKind::vanilla(k)?,
        (other, Some(_)) => {
            return Err(Error::InvalidArgument(format!("--k applies only to vanilla, not {other}")))
        }
        (other, None) => other,
    };
    let (theta, provenance) = match args.theta {
        Some(_) => resolve_theta(kind, args.delta, args.theta)?,
        None => {
            let mut cache = CalibrationCache::open(true);
            let e = calibrated(&mut cache, kind, args.delta)?;
            cache.save();
            (e.theta, e.method.into())
        }
    };
    let (op, source) = open_source(args)?;
    let report = estimate(&*op, kind, theta, RandomSource::new(args.seed, args.stream))?;
    let out = EstimateOutput {
        source,
        kind,
        value: report.value,
        theta,
        provenance,
        delta: args.theta.is_none().then_some(args.delta),
        matvec_count: report.matvec_count,
        sequential_depth: report.sequential_depth,
        seed: report.seed,
        stream_id: report.stream_id,
    };
    if args.json {
        return print_json(&out);
    }
    let delta = out.delta.map_or("-".to_string(), |d| d.to_string());
    println!("source           {}", out.source);
    println!("kind             {}", out.kind);
    println!("upper bound      {:.12e}", out.value);
    println!("theta            {:.6} ({})", out.theta, out.provenance);
    println!("delta            {delta}");
    println!("matvecs          {} (depth {})", out.matvec_count, out.sequential_depth);
    println!("seed             {} (stream {})", out.seed, out.stream_id);
    Ok(())
}

fn run_bench(args: &BenchArgs) -> specbound::Result<()> {
    let cfg = BenchConfig::load(&args.config)?;
    prepare_output_dir(&args.out, args.force)?;
    let opts = CampaignOptions {
        full: args.full,
        workers: args.workers,
    };
    let result = run_campaign(&cfg, &opts)?;
    let files = write_campaign(&result, &cfg, &opts, &args.out)?;
    if args.json {
        return print_json(&result.summaries);
    }
    println!(
        "{:<14} {:<16} {:>8} {:>9} {:>10} {:>12} {:>9}",
        "matrix", "kind", "theta", "n", "delta_real", "mae", "rel_mae"
    );
    for s in &result.summaries {
        println!(
            "{:<14} {:<16} {:>8.4} {:>9} {:>10.5} {:>12.5} {:>9.4}",
            s.matrix_id,
            s.kind.to_string(),
            s.theta,
            s.n_trials,
            s.delta_real,
            s.mae,
            s.rel_mae
        );
    }
    for f in files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".truth.json");
    out.with_file_name(name)
}

fn run_gen(args: &GenArgs) -> specbound::Result<()> {
    let spec = SpectrumSpec::new(args.sv.clone(), args.shape.0, args.shape.1)?;
    let (op, _) = gen_synthetic(&spec, args.seed)?;
    let m = op.into_matrix();
    let truth = dense_svd(&m)?;
    save_matrix(&m, &args.out, MatrixFormat::from_path(&args.out))?;
    let side = sidecar_path(&args.out);
    let text = serde_json::to_string_pretty(&truth)? + "\n";
    std::fs::write(&side, text).map_err(|e| Error::Io {
        path: side.clone(),
        source: e,
    })?;
    if args.json {
        return print_json(&truth);
    }
    println!("wrote {} ({}x{})", args.out.display(), m.rows(), m.cols());
    println!("wrote {}", side.display());
    println!("spectral norm    {:.12}", truth.spectral_norm);
    println!("effective rank   {:.6}", truth.effective_rank);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Calibrate(a) => calibrate(a),
        Command::Estimate(a) => run_estimate(a),
        Command::Bench(a) => run_bench(a),
        Command::Gen(a) => run_gen(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
