use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "scatter-sense", version, about = "Locate scatterers and identify their materials from reflection loss")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute a reflection-loss database from the material catalog.
    GenDb(GenDbArgs),
    /// Validate a reflection-loss database CSV and optionally rewrite it.
    ImportDb(ImportDbArgs),
    /// Write plot-ready curve data.
    EmitCurves(EmitCurvesArgs),
    /// Trace a scene's probe ray and write the resulting measurement.
    Simulate(SimulateArgs),
    /// Localize scatterers from one measurement.
    Solve(SolveArgs),
    /// Turn a candidate table into material-tagged points.
    ExportPoints(ExportPointsArgs),
}

#[derive(Debug, Args)]
pub struct CatalogArgs {
    /// Material catalog JSON; defaults to the bundled catalog.
    #[arg(long)]
    pub catalog: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenDbArgs {
    #[arg(long)]
    pub freq_ghz: f64,
    /// Angle grid as start:stop:step in degrees.
    #[arg(long)]
    pub angles: String,
    /// Comma-separated material names.
    #[arg(long, value_delimiter = ',', required = true)]
    pub materials: Vec<String>,
    #[command(flatten)]
    pub catalog: CatalogArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ImportDbArgs {
    pub input: PathBuf,
    /// Rewrite the validated database here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EmitCurvesArgs {
    /// Curve kind, e.g. rl-vs-angle, coeff-amplitude, coeff-power,
    /// sigma-rl-surface, iso-rl-trace.
    pub kind: String,
    #[arg(long, default_value_t = 100.0)]
    pub freq_ghz: f64,
    #[arg(long, default_value = "0:89:1")]
    pub angles: String,
    #[arg(long, value_delimiter = ',', default_value = "wood,plasterboard,glass")]
    pub materials: Vec<String>,
    #[command(flatten)]
    pub catalog: CatalogArgs,
    /// Loss table for the surface and trace kinds instead of computing one.
    #[arg(long)]
    pub db: Option<PathBuf>,
    /// Target summed loss for iso-rl-trace.
    #[arg(long, allow_hyphen_values = true)]
    pub target_rl_db: Option<f64>,
    #[arg(long)]
    pub rl_tol: Option<f64>,
    #[arg(long)]
    pub angle_step: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Scene JSON.
    #[arg(long)]
    pub scene: PathBuf,
    /// Loss table; by default one is computed for the scene's materials.
    #[arg(long)]
    pub db: Option<PathBuf>,
    #[command(flatten)]
    pub catalog: CatalogArgs,
    /// Transmitter position, overriding the scene's probe.
    #[arg(long, allow_hyphen_values = true)]
    pub tx: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub aod: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub rx: Option<String>,
    /// Standard deviation of the per-sample power noise in dB.
    #[arg(long, default_value_t = 0.0)]
    pub noise_sigma_db: f64,
    #[arg(long, default_value_t = 1)]
    pub samples: usize,
    /// Required whenever noise is enabled.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Registered method name (method1, method2).
    pub method: String,
    #[arg(long, required = true)]
    pub db: PathBuf,
    /// Measurement JSON, instead of the individual measurement flags.
    #[arg(long, conflicts_with_all = ["tx", "rx", "aod", "aoa", "path_m", "tof_s", "rl_db", "p_tx_dbm", "p_rx_dbm"])]
    pub measurement: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub tx: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub rx: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub aod: Option<String>,
    /// Arrival direction, pointing into the receiver.
    #[arg(long, allow_hyphen_values = true)]
    pub aoa: Option<String>,
    #[arg(long, conflicts_with = "tof_s")]
    pub path_m: Option<f64>,
    /// Time of flight in seconds, converted to a path length.
    #[arg(long)]
    pub tof_s: Option<f64>,
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["p_tx_dbm", "p_rx_dbm"])]
    pub rl_db: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "p_rx_dbm")]
    pub p_tx_dbm: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "p_tx_dbm")]
    pub p_rx_dbm: Option<f64>,
    /// Half-width of the loss uncertainty interval.
    #[arg(long, default_value_t = 0.0)]
    pub rl_unc: f64,
    /// Carrier frequency; defaults to the database's.
    #[arg(long)]
    pub freq_ghz: Option<f64>,
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Candidate table destination; printed to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format; inferred from the --out extension when absent.
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    #[arg(long)]
    pub delta_d: Option<f64>,
    #[arg(long)]
    pub path_tol: Option<f64>,
    #[arg(long)]
    pub rl_tol: Option<f64>,
    #[arg(long)]
    pub angle_step: Option<f64>,
    #[arg(long)]
    pub max_path: Option<f64>,
    #[arg(long)]
    pub extrapolation_bound: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ExportPointsArgs {
    /// Candidate table (CSV or JSON) written by `solve`.
    #[arg(long)]
    pub candidates: PathBuf,
    /// Keep only the first N ranks.
    #[arg(long)]
    pub top: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}
