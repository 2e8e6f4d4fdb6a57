mod args;
mod commands;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

/// Entropy and kinetic laboratory for the Aviles–Giga functional.
#[derive(Parser, Debug)]
#[command(name = "eklab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Canonical fields.
    #[command(subcommand)]
    Fields(FieldsCmd),
    /// Entropies and entropy productions.
    #[command(subcommand)]
    Entropy(EntropyCmd),
    /// Kinetic indicator and density stacks.
    #[command(subcommand)]
    Kinetic(KineticCmd),
    /// Compensation identity and Besov bootstrap.
    #[command(subcommand)]
    Comp(CompCmd),
    /// Structure functions and Besov exponents.
    #[command(subcommand)]
    Besov(BesovCmd),
    /// Aviles–Giga energy minimization.
    #[command(subcommand)]
    Ag(AgCmd),
    /// Run one experiment and write its report; exits 1 if a criterion fails.
    Run(RunArgs),
}

#[derive(Subcommand, Debug)]
pub enum FieldsCmd {
    /// Sample a canonical field on a square grid.
    Gen(GenArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum FieldKind {
    Constant,
    Vortex,
    Wall,
    MollifiedWall,
    Smooth,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum AxisArg {
    Vertical,
    Horizontal,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum FieldFormat {
    Angle,
    Vector,
}

#[derive(Args, Debug)]
pub struct GridArgs {
    /// Cells per side.
    #[arg(long, default_value_t = 128)]
    pub n: usize,
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub lo: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub hi: f64,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: FieldKind,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Support: full, disk:cx,cy,r, annulus:cx,cy,r1,r2 or rect:x0,y0,x1,y1.
    #[arg(long, default_value = "full")]
    pub region: String,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub theta0: f64,
    /// Vortex center `x,y`.
    #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
    pub center: String,
    /// Wall angle in [0, π/2].
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value = "vertical")]
    pub axis: AxisArg,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub offset: f64,
    /// Mollified wall width.
    #[arg(long, default_value_t = 0.1)]
    pub width: f64,
    #[arg(long, value_enum, default_value = "angle")]
    pub format: FieldFormat,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Subcommand, Debug)]
pub enum EntropyCmd {
    /// Entropy production `div Φ(m)` of a stored field.
    Produce(ProduceArgs),
    /// Generator round trip and tangency defect of named entropies.
    Check(CheckArgs),
}

#[derive(Args, Debug)]
pub struct ProduceArgs {
    #[arg(long)]
    pub field: PathBuf,
    /// id, jk1, jk2, jk1-literal, jk2-literal or psi:<table-file>.
    #[arg(long, default_value = "jk2")]
    pub entropy: String,
    #[arg(long, default_value_t = eklab_core::entropy::DEFAULT_KAPPA)]
    pub kappa: f64,
    /// Evaluation region; defaults to the field support eroded by one cell.
    #[arg(long)]
    pub region: Option<String>,
    /// Write the production density here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[arg(long, value_delimiter = ',', default_value = "id,jk1,jk2")]
    pub entropies: Vec<String>,
    /// Generator samples for the round trip.
    #[arg(long, default_value_t = 4096)]
    pub samples: usize,
    /// Exit 1 when a round-trip error exceeds this.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Subcommand, Debug)]
pub enum KineticCmd {
    /// Write `χ` (and `σ` for the synthetic pair) as kinetic stacks.
    Pair(PairArgs),
}

#[derive(Args, Debug)]
pub struct PairArgs {
    /// Build `χ` from this field instead of the synthetic pair.
    #[arg(long)]
    pub field: Option<PathBuf>,
    /// Synthetic pair grid size on `[0, 2π]²`.
    #[arg(long, default_value_t = 64)]
    pub n: usize,
    /// Angular nodes (even, at least 128).
    #[arg(long, default_value_t = 128)]
    pub ns: usize,
    #[arg(long)]
    pub out: PathBuf,
    /// Density output; synthetic pair only.
    #[arg(long)]
    pub sigma_out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum CompCmd {
    /// Residual of the compensation identity.
    Residual(ResidualArgs),
    /// Bootstrap table `C(τ)` for a stored field.
    Bootstrap(BootstrapArgs),
}

#[derive(Args, Debug)]
pub struct ResidualArgs {
    /// Angle or vector field; `χ` is generated from it.
    #[arg(long, conflicts_with = "kinetic")]
    pub field: Option<PathBuf>,
    /// Stored `χ` stack.
    #[arg(long)]
    pub kinetic: Option<PathBuf>,
    /// Stored `σ` stack matching `--kinetic`.
    #[arg(long, requires = "kinetic")]
    pub sigma: Option<PathBuf>,
    /// Angular nodes when generating `χ` from a field.
    #[arg(long, default_value_t = 256)]
    pub ns: usize,
    /// Kernel: sin2, gamma=<γ> or a bare exponent.
    #[arg(long, default_value = "3")]
    pub kernel: String,
    /// radial:cx,cy,inner,outer, ring:cx,cy,r1,r2,ramp or tensor:cx,cy,ix,iy,ox,oy.
    #[arg(long)]
    pub eta: String,
    #[arg(long)]
    pub tau_max: f64,
    /// Power of the sine bump used for ρ.
    #[arg(long, default_value_t = 4)]
    pub rho_power: i32,
}

#[derive(Args, Debug)]
pub struct BootstrapArgs {
    #[arg(long)]
    pub field: PathBuf,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    /// Ω; defaults to the field support.
    #[arg(long)]
    pub omega: Option<String>,
    #[arg(long)]
    pub u: String,
    /// Ω′ inside U.
    #[arg(long)]
    pub inner: String,
    #[arg(long)]
    pub eta: String,
    /// Shifts; defaults to r₀/2^k for k = 2..6.
    #[arg(long, value_delimiter = ',')]
    pub taus: Vec<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum BesovCmd {
    /// Structure-function slope and seminorm of a stored field.
    Fit(FitArgs),
}

#[derive(Args, Debug)]
pub struct FitArgs {
    #[arg(long)]
    pub field: PathBuf,
    #[arg(long, default_value_t = 6.0)]
    pub q: f64,
    /// U; defaults to the field support.
    #[arg(long)]
    pub u: Option<String>,
    /// Ladder exponents `kmin,kmax` for `|h| = 2^-k L`.
    #[arg(long, default_value = "2,7")]
    pub ladder: String,
    /// Write the per-direction samples as CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum AgCmd {
    /// ε-continuation of the stream-function minimization.
    Minimize(MinimizeArgs),
}

#[derive(Args, Debug)]
pub struct MinimizeArgs {
    #[command(flatten)]
    pub keys: ConfigFlags,
    /// Boundary layer thickness in cells.
    #[arg(long, default_value_t = 3)]
    pub delta_cells: usize,
}

/// Flags mirroring the experiment config keys; unset flags keep the file or default value.
#[derive(Args, Debug, Default)]
pub struct ConfigFlags {
    /// Grid sizes, comma separated.
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long)]
    pub ns_factor: Option<String>,
    #[arg(long)]
    pub gamma: Option<String>,
    #[arg(long)]
    pub entropies: Option<String>,
    /// disk, square or ellipse.
    #[arg(long)]
    pub domain: Option<String>,
    #[arg(long)]
    pub eps_start: Option<String>,
    #[arg(long)]
    pub eps_factor: Option<String>,
    #[arg(long)]
    pub eps_count: Option<String>,
    #[arg(long)]
    pub max_iter: Option<String>,
    #[arg(long)]
    pub grad_tol: Option<String>,
    #[arg(long)]
    pub memory: Option<String>,
    #[arg(long)]
    pub noise: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    /// Output directory for artifacts and report.json.
    #[arg(long)]
    pub output: Option<String>,
}

impl ConfigFlags {
    pub fn pairs(&self) -> Vec<(&'static str, &str)> {
        [
            ("grid", &self.grid),
            ("ns_factor", &self.ns_factor),
            ("gamma", &self.gamma),
            ("entropies", &self.entropies),
            ("domain", &self.domain),
            ("eps_start", &self.eps_start),
            ("eps_factor", &self.eps_factor),
            ("eps_count", &self.eps_count),
            ("max_iter", &self.max_iter),
            ("grad_tol", &self.grad_tol),
            ("memory", &self.memory),
            ("noise", &self.noise),
            ("seed", &self.seed),
            ("output", &self.output),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_deref().map(|v| (k, v)))
        .collect()
    }
}

#[derive(Args, Debug)]
pub struct RunArgs {
    /// E0 to E9.
    pub id: String,
    /// Flat `key = value` config file; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub keys: ConfigFlags,
    /// Print the report as JSON instead of the summary.
    #[arg(long)]
    pub json: bool,
}

fn init_threads() -> eklab_core::Result<()> {
    let Ok(v) = std::env::var("EKLAB_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| eklab_core::Error::Config(format!("EKLAB_THREADS=`{v}` is not a positive count")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| eklab_core::Error::Config(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_threads().and_then(|()| match cli.command {
        Command::Fields(FieldsCmd::Gen(a)) => commands::fields_gen(&a),
        Command::Entropy(EntropyCmd::Produce(a)) => commands::entropy_produce(&a),
        Command::Entropy(EntropyCmd::Check(a)) => commands::entropy_check(&a),
        Command::Kinetic(KineticCmd::Pair(a)) => commands::kinetic_pair(&a),
        Command::Comp(CompCmd::Residual(a)) => commands::comp_residual(&a),
        Command::Comp(CompCmd::Bootstrap(a)) => commands::comp_bootstrap(&a),
        Command::Besov(BesovCmd::Fit(a)) => commands::besov_fit(&a),
        Command::Ag(AgCmd::Minimize(a)) => commands::ag_minimize(&a),
        Command::Run(a) => commands::run(&a),
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
