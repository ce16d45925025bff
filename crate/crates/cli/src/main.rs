//! `intesn`: runs the reservoir experiments and writes result files.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use intesn_core::data::ResultFormat;
use intesn_core::reservoir::EngineKind;

use config::ConfigError;

#[derive(Parser)]
#[command(name = "intesn", version, about = "Integer echo state network experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decode the token presented d steps ago (d = 0..max-delay).
    Recall(RecallArgs),
    /// Store image patches in the integer reservoir and reconstruct them.
    Patches(PatchArgs),
    /// Classify time series from final reservoir states.
    Classify(ClassifyArgs),
    /// Free-running generation of 0.5 sin(n/4).
    Sine(GeneratorArgs),
    /// Free-running prediction of the Mackey-Glass series.
    Mackey(GeneratorArgs),
    /// Time reservoir updates of both engines.
    Bench(BenchArgs),
    /// Print the contents of a saved model file.
    InspectModel { path: PathBuf },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EngineChoice {
    Esn,
    Intesn,
    IntesnLarge,
    /// esn and intesn with matched seeds.
    Both,
    /// esn, intesn and intesn-large.
    All,
}

impl EngineChoice {
    fn kinds(self) -> Vec<EngineKind> {
        match self {
            EngineChoice::Esn => vec![EngineKind::Esn],
            EngineChoice::Intesn => vec![EngineKind::Intesn],
            EngineChoice::IntesnLarge => vec![EngineKind::IntesnLarge],
            EngineChoice::Both => vec![EngineKind::Esn, EngineKind::Intesn],
            EngineChoice::All => vec![EngineKind::Esn, EngineKind::Intesn, EngineKind::IntesnLarge],
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatChoice {
    Json,
    Csv,
}

#[derive(Args)]
struct Common {
    /// Engine(s) to run.
    #[arg(long, value_enum)]
    engine: Option<EngineChoice>,
    /// JSON file with task parameters; explicit flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// First seed.
    #[arg(long, env = "RESERVOIR_SEED", default_value_t = 1)]
    seed: u64,
    /// Number of consecutive seeds starting at --seed, or a comma-separated
    /// list of seeds.
    #[arg(long)]
    seeds: Option<String>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Result file (default: <experiment>.json).
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Result format (default: from the file extension, else json).
    #[arg(long, value_enum)]
    format: Option<FormatChoice>,
    /// Save the model trained under the first seed.
    #[arg(long)]
    save_model: Option<PathBuf>,
}

impl Common {
    fn format(&self, out: &std::path::Path) -> ResultFormat {
        match self.format {
            Some(FormatChoice::Json) => ResultFormat::Json,
            Some(FormatChoice::Csv) => ResultFormat::Csv,
            None => ResultFormat::from_path(out).unwrap_or(ResultFormat::Json),
        }
    }
}

#[derive(Args)]
struct RecallArgs {
    #[command(flatten)]
    common: Common,
    /// Reservoir size (float reservoir size for intesn-large).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    kappa: Option<i64>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    alphabet: Option<usize>,
    #[arg(long)]
    max_delay: Option<usize>,
    #[arg(long)]
    train_len: Option<usize>,
    #[arg(long)]
    large_train_len: Option<usize>,
    #[arg(long)]
    washout: Option<usize>,
    #[arg(long)]
    test_len: Option<usize>,
    /// Chance-level control with targets unrelated to the input.
    #[arg(long)]
    shuffle_targets: bool,
}

#[derive(Args)]
struct PatchArgs {
    #[command(flatten)]
    common: Common,
    /// P5/P6 image (repeatable); defaults to the three bundled patches.
    #[arg(long = "image")]
    images: Vec<PathBuf>,
    /// Reservoir as N:kappa (repeatable); defaults to 64000:11, 32000:8, 16000:6 and 8000:4.
    #[arg(long = "reservoir", value_parser = parse_reservoir)]
    reservoirs: Vec<(usize, i64)>,
    #[arg(long)]
    max_pixels: Option<usize>,
    /// Directory for reconstructed images of the first seed.
    #[arg(long)]
    images_out: Option<PathBuf>,
}

fn parse_reservoir(s: &str) -> Result<(usize, i64), String> {
    let (n, k) = s.split_once(':').ok_or("expected N:kappa")?;
    Ok((n.parse().map_err(|e| format!("N: {e}"))?, k.parse().map_err(|e| format!("kappa: {e}"))?))
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    common: Common,
    /// Training split in UCR layout (label first).
    #[arg(long, requires = "test")]
    train: Option<PathBuf>,
    /// Test split in UCR layout.
    #[arg(long, requires = "train")]
    test: Option<PathBuf>,
    /// JSON manifest of a multivariate dataset.
    #[arg(long, conflicts_with_all = ["train", "test", "synthetic"])]
    manifest: Option<PathBuf>,
    /// Bundled synthetic dataset: a suite shape name, `suite` or `two-level`.
    #[arg(long, conflicts_with_all = ["train", "test"])]
    synthetic: Option<String>,
    /// Seed of the synthetic data.
    #[arg(long, default_value_t = 1)]
    data_seed: u64,
    /// Map the distinct labels of the training split onto 0..C.
    #[arg(long)]
    remap_labels: bool,
    #[arg(long)]
    delimiter: Option<char>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    kappa: Option<i64>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    level_step: Option<f64>,
    /// Size of the intesn-large reservoir (default: footprint-matched).
    #[arg(long)]
    large_size: Option<usize>,
    /// Chance-level control with permuted labels.
    #[arg(long)]
    shuffle_labels: bool,
}

#[derive(Args)]
struct GeneratorArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    kappa: Option<i64>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    bias: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    train_len: Option<usize>,
    #[arg(long)]
    washout: Option<usize>,
    /// Free-running steps.
    #[arg(long)]
    horizon: Option<usize>,
    /// Leading free-running steps scored by NRMSE.
    #[arg(long)]
    score_steps: Option<usize>,
    /// Quantization of the float network's data: none, train-only or both.
    #[arg(long)]
    esn_quantization: Option<String>,
    #[arg(long)]
    teacher_noise: Option<f64>,
}

#[derive(Args)]
struct BenchArgs {
    /// Reservoir size.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    kappa: Option<i64>,
    /// Updates per repetition (M).
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    repetitions: Option<usize>,
    #[arg(long, env = "RESERVOIR_SEED")]
    seed: Option<u64>,
    /// JSON file with bench parameters.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the report as JSON.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<ConfigError>().is_some() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<intesn_core::Error>() {
            return if e.is_config_error() { 2 } else { 1 };
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Recall(a) => commands::recall(a),
        Command::Patches(a) => commands::patches(a),
        Command::Classify(a) => commands::classify(a),
        Command::Sine(a) => commands::generator("sine", a),
        Command::Mackey(a) => commands::generator("mackey", a),
        Command::Bench(a) => commands::bench(a),
        Command::InspectModel { path } => commands::inspect_model(&path),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
