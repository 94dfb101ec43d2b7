use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "bellharness", version, about = "Bell-test harness for local hidden-variable simulations")]
pub struct Cli {
    /// Print one machine-readable JSON document instead of a summary.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run an experiment and report correlations, CHSH and the success test.
    Simulate(SimulateArgs),
    /// Fourier analysis of a strategy's measurement functions.
    Spectrum(SpectrumArgs),
    /// Show that no antipodal local model yields exactly -k cos(theta).
    Certificate(CertificateArgs),
    /// CHSH score from a run log or from four correlations.
    Chsh(ChshArgs),
    /// Check a probability table against the one-sided CHSH and no-signalling constraints.
    Fine(FineArgs),
    /// Feasibility of P(X=Y), P(Y=Z), P(Z=X) for three binary variables.
    Boole(BooleArgs),
    /// Run the referee on a TCP address and wait for stations.
    Serve(ServeArgs),
    /// Connect a station or the source to a referee.
    Station(StationArgs),
    /// Re-execute a run log and compare it trial by trial.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    #[value(alias = "four-point")]
    Fourpoint,
    FixedDelta,
    #[value(alias = "uniform-independent")]
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleArg {
    Singlet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TransportArg {
    InProcess,
    Sockets,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrientationArg {
    AsRecorded,
    BobFlipped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RoleArg {
    Alice,
    Bob,
    Source,
}

/// Decimal or `0x`-prefixed hexadecimal.
pub fn parse_seed(text: &str) -> Result<u64, String> {
    let parsed = match text.strip_prefix("0x") {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => text.parse(),
    };
    parsed.map_err(|e| format!("`{text}` is not a 64-bit seed: {e}"))
}

fn parse_list<const N: usize>(text: &str) -> Result<[f64; N], String> {
    let values = text
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    <[f64; N]>::try_from(values).map_err(|v| format!("expected {N} comma-separated numbers, got {}", v.len()))
}

/// Two angles in degrees, `label1,label2`.
pub fn parse_pair(text: &str) -> Result<[f64; 2], String> {
    parse_list::<2>(text)
}

pub fn parse_four(text: &str) -> Result<[f64; 4], String> {
    parse_list::<4>(text)
}

/// Two strategy names, `alice,bob`.
pub fn parse_names(text: &str) -> Result<[String; 2], String> {
    match text.split_once(',') {
        Some((a, b)) if !a.is_empty() && !b.is_empty() => Ok([a.to_string(), b.to_string()]),
        _ => Err(format!("expected `alice,bob`, got `{text}`")),
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Alice's strategy.
    #[arg(long = "a", visible_alias = "alice", default_value = "sign")]
    pub alice: String,

    /// Bob's strategy; `antipodal` means the negation of Alice's.
    #[arg(long = "b", visible_alias = "bob", default_value = "antipodal")]
    pub bob: String,

    /// Use a nonlocal reference oracle instead of the two strategies.
    #[arg(long, value_enum)]
    pub oracle: Option<OracleArg>,

    #[arg(long, value_enum, default_value = "fourpoint")]
    pub mode: ModeArg,

    /// Offset of Alice's setting over Bob's in fixed-delta mode, degrees.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub delta_deg: f64,

    /// Number of trials.
    #[arg(long = "n", short = 'n', default_value_t = 10_000)]
    pub n_trials: u64,

    /// Seed for both the hidden-variable and the settings stream.
    #[arg(long, env = "BELLHARNESS_SEED", value_parser = parse_seed)]
    pub seed: Option<u64>,

    #[arg(long, value_parser = parse_seed)]
    pub seed_lambda: Option<u64>,

    #[arg(long, value_parser = parse_seed)]
    pub seed_settings: Option<u64>,

    /// Number of grid points on the setting circle.
    #[arg(long, default_value_t = 360)]
    pub grid: usize,

    /// Alice's two settings in degrees (label 1, label 2).
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    pub alice_deg: Option<[f64; 2]>,

    /// Bob's two settings in degrees (label 1, label 2).
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    pub bob_deg: Option<[f64; 2]>,

    /// Give each station its own history of settings and outcomes.
    #[arg(long)]
    pub memory: bool,

    /// Stations derive the hidden variable from the seed; no source process.
    #[arg(long)]
    pub virtual_source: bool,

    /// Sign convention for the success test, fixed before the run.
    #[arg(long, value_enum, default_value = "bob-flipped")]
    pub orientation: OrientationArg,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub run: RunArgs,

    #[arg(long, value_enum, default_value = "in-process")]
    pub transport: TransportArg,

    /// Write the run log (JSON lines).
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Write the correlation-by-offset curve as CSV.
    #[arg(long)]
    pub curve: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long, default_value = "sign")]
    pub strategy: String,

    /// Number of hidden-variable draws to average over.
    #[arg(long, default_value_t = 1000)]
    pub n_lambda: usize,

    #[arg(long, env = "BELLHARNESS_SEED", value_parser = parse_seed, default_value = "42")]
    pub seed: u64,

    #[arg(long, default_value_t = 360)]
    pub grid: usize,

    /// Correlation curve CSV (index,theta_radians,value).
    #[arg(long)]
    pub csv: Option<PathBuf>,

    /// Averaged power spectrum CSV.
    #[arg(long)]
    pub power_csv: Option<PathBuf>,

    /// Full report as JSON.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CertificateArgs {
    /// Target amplitude; all of 0, 0.1, ..., 1 when omitted.
    #[arg(long)]
    pub k: Option<f64>,

    #[arg(long, default_value_t = 16)]
    pub grid: usize,
}

#[derive(Debug, Args)]
pub struct ChshArgs {
    /// Run log to analyse.
    #[arg(long, conflicts_with = "rho", required_unless_present = "rho")]
    pub log: Option<PathBuf>,

    /// Correlations rho11,rho12,rho21,rho22.
    #[arg(long, value_parser = parse_four, allow_hyphen_values = true)]
    pub rho: Option<[f64; 4]>,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["table", "singlet", "strategies", "log"])))]
pub struct FineArgs {
    /// Table file: {"pxy_ab": [[p++, p+-, p-+, p--], ...]} rows 11, 12, 21, 22.
    #[arg(long)]
    pub table: Option<PathBuf>,

    /// The singlet table at the chosen settings.
    #[arg(long)]
    pub singlet: bool,

    /// Exact table of a strategy pair, e.g. `sign,antipodal`.
    #[arg(long, value_parser = parse_names)]
    pub strategies: Option<[String; 2]>,

    /// Estimate the table from a run log and test it statistically.
    #[arg(long)]
    pub log: Option<PathBuf>,

    /// Critical z-score for the statistical mode.
    #[arg(long, default_value_t = 4.0)]
    pub z: f64,

    #[arg(long, default_value_t = 360)]
    pub grid: usize,

    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    pub alice_deg: Option<[f64; 2]>,

    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    pub bob_deg: Option<[f64; 2]>,

    /// Also write the table that was checked.
    #[arg(long)]
    pub write_table: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BooleArgs {
    /// P(X=Y)
    pub p: f64,
    /// P(Y=Z)
    pub q: f64,
    /// P(Z=X)
    pub r: f64,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[command(flatten)]
    pub run: RunArgs,

    /// Address to listen on; `:9000` means all interfaces.
    #[arg(long, default_value = "127.0.0.1:9000")]
    pub listen: String,

    /// Per-trial deadline in seconds.
    #[arg(long, default_value_t = 30.0)]
    pub timeout: f64,

    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StationArgs {
    /// Referee address.
    #[arg(long, default_value = "127.0.0.1:9000")]
    pub connect: String,

    #[arg(long, value_enum)]
    pub role: RoleArg,

    /// Strategy to play instead of the one the referee names.
    #[arg(long)]
    pub strategy: Option<String>,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    #[arg(long)]
    pub log: PathBuf,
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn seeds() {
        assert_eq!(parse_seed("42"), Ok(42));
        assert_eq!(parse_seed("0xff"), Ok(255));
        assert!(parse_seed("-1").is_err());
    }

    #[test]
    fn lists() {
        assert_eq!(parse_pair("90,0"), Ok([90.0, 0.0]));
        assert_eq!(parse_four("-0.5, 0.5,1,-1"), Ok([-0.5, 0.5, 1.0, -1.0]));
        assert!(parse_pair("1,2,3").is_err());
        assert!(parse_names("sign").is_err());
    }

    #[test]
    fn negative_lists_parse() {
        let cli = Cli::try_parse_from(["bellharness", "chsh", "--rho", "-0.7,-0.7,-0.7,0.7"]).unwrap();
        let Command::Chsh(a) = cli.command else { panic!() };
        assert_eq!(a.rho, Some([-0.7, -0.7, -0.7, 0.7]));
    }
}
