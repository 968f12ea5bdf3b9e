use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use lgtd::bench::{self, BenchConfig, Method, SweepParam};
use lgtd::io::{self, OutputFormat};
use lgtd::pipeline::lgtd_decompose;
use lgtd::{metrics, synth, Error, GlobalTrendConfig, LltParams, SeasonRegime, SyntheticSpec, TrendKind};

#[derive(Parser)]
#[command(name = "lgtd", version, about = "Season-length free local-global trend decomposition")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose a series read from CSV.
    Decompose(DecomposeArgs),
    /// Generate synthetic series with ground truth.
    Synth(SynthArgs),
    /// Score a decomposition against ground truth.
    Eval(EvalArgs),
    /// Decompose and score every dataset in a suite.
    Bench(BenchArgs),
    /// Re-run the benchmark across values of one parameter.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum GlobalKind {
    Ma,
    Poly,
    Local,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct LltArgs {
    /// Points before each focus range used to fit its line.
    #[arg(long, default_value_t = 3)]
    window: usize,
    /// Baseline error percentile.
    #[arg(long, default_value_t = 30.0)]
    p0: f64,
    /// Percentile step per iteration.
    #[arg(long, default_value_t = 10.0)]
    dp: f64,
    #[arg(long, default_value_t = 20)]
    kmax: usize,
    /// Keep the percentile fixed at p0.
    #[arg(long)]
    no_update_threshold: bool,
}

impl LltArgs {
    fn params(&self) -> LltParams {
        LltParams {
            window: self.window,
            max_iterations: self.kmax,
            baseline_percentile: self.p0,
            percentile_step: self.dp,
            update_threshold: !self.no_update_threshold,
        }
    }
}

#[derive(Args)]
struct DecomposeArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = GlobalKind::Ma)]
    global: GlobalKind,
    /// Window for `ma` and `local`; defaults to about a tenth of the series.
    #[arg(long, conflicts_with = "degree")]
    global_window: Option<usize>,
    /// Degree for `poly`.
    #[arg(long, default_value_t = 1)]
    degree: usize,
    #[command(flatten)]
    llt: LltArgs,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Format::Csv, Format::Json])]
    format: Vec<Format>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TrendArg {
    Linear,
    Invv,
    Piecewise,
}

#[derive(Clone, Copy, ValueEnum)]
enum SeasonArg {
    Fixed,
    Transitive,
    Variable,
}

#[derive(Args)]
struct SynthArgs {
    /// Generate all nine trend x seasonality datasets.
    #[arg(long)]
    suite: bool,
    #[arg(long, value_enum, required_unless_present = "suite")]
    trend: Option<TrendArg>,
    #[arg(long, value_enum, required_unless_present = "suite")]
    season: Option<SeasonArg>,
    #[arg(long, default_value_t = 2000)]
    length: usize,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long, default_value_t = 10.0)]
    amplitude: f64,
    #[arg(long, default_value_t = 1.0)]
    trend_scale: f64,
    #[arg(long, default_value_t = bench::DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    /// Directory holding `result.json`.
    #[arg(long)]
    decomp: PathBuf,
    /// Directory holding `truth.csv`.
    #[arg(long)]
    truth: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// Suite directory; generated there if it has no manifest.
    #[arg(long)]
    suite: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Seed used when the suite has to be generated.
    #[arg(long, default_value_t = bench::DEFAULT_SEED)]
    seed: u64,
    #[command(flatten)]
    llt: LltArgs,
}

#[derive(Args)]
struct SweepArgs {
    /// One of p0, dp, window, kmax.
    #[arg(long)]
    param: String,
    #[arg(long, value_delimiter = ',', required = true)]
    values: Vec<f64>,
    #[arg(long)]
    suite: PathBuf,
    /// Output table; `.csv`, `.md` or `.json`.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = bench::DEFAULT_SEED)]
    seed: u64,
    #[command(flatten)]
    llt: LltArgs,
}

fn decompose(args: &DecomposeArgs) -> Result<(), Error> {
    let series = io::read_series_csv(&args.input)?;
    let len = series.len();
    let global = match args.global {
        GlobalKind::Ma => GlobalTrendConfig::MovingAverage {
            window: args.global_window.unwrap_or_else(|| GlobalTrendConfig::default_window(len)),
        },
        GlobalKind::Local => GlobalTrendConfig::LocalRegression {
            window: args.global_window.unwrap_or_else(|| GlobalTrendConfig::default_window(len)),
        },
        GlobalKind::Poly => GlobalTrendConfig::PolynomialLeastSquares {
            degree: args.degree,
        },
    };
    let d = lgtd_decompose(&series, &global, &args.llt.params())?;
    let formats: Vec<OutputFormat> = args
        .format
        .iter()
        .map(|f| match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        })
        .collect();
    for path in io::write_decomposition(&series, &d, &args.out, &formats)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn synth_cmd(args: &SynthArgs) -> Result<(), Error> {
    if args.suite {
        let manifest = io::write_suite(&args.out, &synth::suite(args.seed), args.seed)?;
        for d in &manifest.datasets {
            println!("{}", args.out.join(&d.series).display());
        }
        return Ok(());
    }
    let trend = match args.trend.expect("required by clap") {
        TrendArg::Linear => TrendKind::Linear,
        TrendArg::Invv => TrendKind::InvertedV,
        TrendArg::Piecewise => TrendKind::Piecewise,
    };
    let season = match args.season.expect("required by clap") {
        SeasonArg::Fixed => SeasonRegime::Fixed,
        SeasonArg::Transitive => SeasonRegime::Transitive,
        SeasonArg::Variable => SeasonRegime::Variable,
    };
    let spec = SyntheticSpec {
        trend,
        season,
        length: args.length,
        noise_sigma: args.sigma,
        seed: args.seed,
        amplitude: args.amplitude,
        trend_scale: args.trend_scale,
    };
    io::write_synthetic(&args.out, &format!("{trend}_{season}"), &spec)?;
    println!("{}", args.out.display());
    Ok(())
}

fn eval_cmd(args: &EvalArgs) -> Result<(), Error> {
    let result = io::read_result(&args.decomp)?;
    let truth = io::read_truth(&args.truth)?;
    let report = metrics::evaluate(&result.decomposition, &truth)?;
    io::write_json(&args.out, &report)?;
    println!(
        "trend {:.4}  seasonal {:.4}  residual {:.4}  overall {:.4}",
        report.trend.mae, report.seasonal.mae, report.residual.mae, report.overall_mae
    );
    Ok(())
}

fn bench_cmd(args: &BenchArgs) -> Result<(), Error> {
    let datasets = bench::load_or_generate_suite(&args.suite, args.seed)?;
    let config = BenchConfig {
        llt: args.llt.params(),
        threads: bench::threads_from_env(),
        ..Default::default()
    };
    let result = bench::run_bench_to_dir(&datasets, &config, &args.out)?;
    print!("{}", result.table.to_markdown());
    Ok(())
}

fn sweep_cmd(args: &SweepArgs) -> Result<(), Error> {
    let param = SweepParam::parse(&args.param)?;
    let datasets = bench::load_or_generate_suite(&args.suite, args.seed)?;
    let report = bench::run_sweep(
        &datasets,
        &args.llt.params(),
        &Method::lgtd(),
        param,
        &args.values,
        bench::threads_from_env(),
    )?;
    report.write(&args.out)?;
    print!("{}", report.to_markdown());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match &cli.command {
        Command::Decompose(a) => decompose(a),
        Command::Synth(a) => synth_cmd(a),
        Command::Eval(a) => eval_cmd(a),
        Command::Bench(a) => bench_cmd(a),
        Command::Sweep(a) => sweep_cmd(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Error::InvalidParams(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
