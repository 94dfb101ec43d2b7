use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::path::Path;
use std::time::Duration;

use bellharness::fourier::io::{write_correlation_csv, write_power_csv, SpectrumDocument};
use bellharness::fourier::{expected_correlation, impossibility_certificate, CertificateReport};
use bellharness::harness::{
    replay_verify, run as run_experiment, run_source, run_station, FourPointSettings, Oracle, Referee, Role, RunConfig,
    RunLog, SettingMode, TestOrientation, Transport, DEFAULT_SEED_LAMBDA, DEFAULT_SEED_SETTINGS,
};
use bellharness::stats::{
    bell_test_log, boole_check, chsh_from_rho, chsh_score, correlation_by_offset, estimate_correlations, fine_check,
    fine_check_counts, write_offset_csv, ChshCorrelations, CountTable, FineReport, OffsetCorrelation, ProbabilityTable,
    TestVerdict,
};
use bellharness::strategy::{builtin, resolve_bob_name, sample_lambdas};
use bellharness::SettingGrid;
use serde::Serialize;

use crate::args::{
    BooleArgs, CertificateArgs, ChshArgs, FineArgs, ModeArg, OrientationArg, ReplayArgs, RoleArg, RunArgs, ServeArgs,
    SimulateArgs, SpectrumArgs, StationArgs, TransportArg,
};
use crate::error::CliError;
use crate::render;

const FIGURE_ONE_ALICE: [f64; 2] = [90.0, 0.0];
const FIGURE_ONE_BOB: [f64; 2] = [45.0, 135.0];

fn print_json<T: Serialize>(value: &T) -> Result<(), CliError> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn four_point(
    grid: SettingGrid,
    alice: Option<[f64; 2]>,
    bob: Option<[f64; 2]>,
) -> Result<FourPointSettings, CliError> {
    Ok(FourPointSettings::from_degrees(grid, alice.unwrap_or(FIGURE_ONE_ALICE), bob.unwrap_or(FIGURE_ONE_BOB))?)
}

pub fn run_config(a: &RunArgs) -> Result<RunConfig, CliError> {
    let grid = SettingGrid::new(a.grid)?;
    let mut config = RunConfig::new(a.n_trials);
    config.grid = grid;
    config.four_point = four_point(grid, a.alice_deg, a.bob_deg)?;
    config = match a.oracle {
        Some(_) => config.with_oracle(Oracle::Singlet),
        None => config.with_strategies(&a.alice, &a.bob),
    };
    config.setting_mode = match a.mode {
        ModeArg::Fourpoint => SettingMode::FourPoint,
        ModeArg::FixedDelta => SettingMode::FixedDelta { delta_steps: grid.steps_from_degrees(a.delta_deg)? },
        ModeArg::Uniform => SettingMode::UniformIndependent,
    };
    config.seed_lambda = a.seed_lambda.or(a.seed).unwrap_or(DEFAULT_SEED_LAMBDA);
    config.seed_settings = a.seed_settings.or(a.seed).unwrap_or(DEFAULT_SEED_SETTINGS);
    config.memory_mode = a.memory;
    config.virtual_source = a.virtual_source;
    config.orientation = match a.orientation {
        OrientationArg::AsRecorded => TestOrientation::AsRecorded,
        OrientationArg::BobFlipped => TestOrientation::BobFlipped,
    };
    config.validate()?;
    Ok(config)
}

#[derive(Debug, Serialize)]
pub struct RunSummary {
    pub trials: u64,
    pub digest: String,
    pub nonlocal: bool,
    pub config: RunConfig,
    pub correlations: ChshCorrelations,
    pub chsh: Option<f64>,
    pub verdict: Option<TestVerdict>,
    pub verdict_note: Option<String>,
    pub offsets: Vec<OffsetCorrelation>,
}

impl RunSummary {
    fn from_log(log: &RunLog) -> Result<Self, CliError> {
        let correlations = estimate_correlations(log)?;
        let (verdict, verdict_note) = match bell_test_log(log) {
            Ok(v) => (Some(v), None),
            Err(e) => (None, Some(e.to_string())),
        };
        Ok(RunSummary {
            trials: log.trials.len() as u64,
            digest: format!("{:016x}", log.digest),
            nonlocal: log.nonlocal,
            config: log.config.clone(),
            chsh: chsh_score(&correlations).ok(),
            correlations,
            verdict,
            verdict_note,
            offsets: correlation_by_offset(&log.trials, &log.config.grid),
        })
    }

    fn emit(&self, json: bool) -> Result<(), CliError> {
        if json {
            print_json(self)
        } else {
            render::run_summary(self);
            Ok(())
        }
    }
}

fn write_log(log: &RunLog, path: &Path) -> Result<(), CliError> {
    log.write_jsonl(BufWriter::new(File::create(path)?))?;
    Ok(())
}

fn read_log(path: &Path) -> Result<RunLog, CliError> {
    Ok(RunLog::read_jsonl(BufReader::new(File::open(path)?))?)
}

pub fn simulate(a: SimulateArgs, json: bool) -> Result<(), CliError> {
    let mut config = run_config(&a.run)?;
    config.transport = match a.transport {
        TransportArg::InProcess => Transport::InProcess,
        TransportArg::Sockets => Transport::Sockets,
    };
    config.validate()?;
    let log = run_experiment(&config)?;
    if let Some(path) = &a.out {
        write_log(&log, path)?;
    }
    let summary = RunSummary::from_log(&log)?;
    if let Some(path) = &a.curve {
        write_offset_csv(&summary.offsets, File::create(path)?).map_err(|e| CliError::Failed(e.to_string()))?;
    }
    summary.emit(json)
}

pub fn spectrum(a: SpectrumArgs, json: bool) -> Result<(), CliError> {
    let grid = SettingGrid::new(a.grid)?;
    let strategy = builtin(&a.strategy, grid)?;
    let (correlation, report) = expected_correlation(strategy.as_ref(), grid, a.seed, a.n_lambda)?;
    let io = |e: bellharness::fourier::io::IoError| CliError::Failed(e.to_string());
    if let Some(path) = &a.csv {
        write_correlation_csv(&correlation, File::create(path)?).map_err(io)?;
    }
    if let Some(path) = &a.power_csv {
        write_power_csv(&report, File::create(path)?).map_err(io)?;
    }
    let doc = SpectrumDocument { strategy: a.strategy.clone(), seed: a.seed, correlation, report };
    if let Some(path) = &a.report {
        fs::write(path, doc.to_json().map_err(io)?)?;
    }
    if json {
        print_json(&doc)
    } else {
        render::spectrum(&doc);
        Ok(())
    }
}

#[derive(Debug, Serialize)]
pub struct CertificateOutput {
    pub grid_points: usize,
    pub reports: Vec<CertificateReport>,
}

pub fn certificate(a: CertificateArgs, json: bool) -> Result<(), CliError> {
    let grid = SettingGrid::new(a.grid)?;
    let ks: Vec<f64> = match a.k {
        Some(k) => vec![k],
        None => (0..=10).map(|i| i as f64 / 10.0).collect(),
    };
    let reports = ks.iter().map(|&k| impossibility_certificate(k, grid)).collect::<Result<Vec<_>, _>>()?;
    let out = CertificateOutput { grid_points: grid.points(), reports };
    if json {
        print_json(&out)
    } else {
        render::certificate(&out);
        Ok(())
    }
}

#[derive(Debug, Serialize)]
pub struct RhoOutput {
    pub rho: [f64; 4],
    pub chsh: f64,
    pub local_bound: f64,
    pub exceeds_local_bound: bool,
}

pub fn chsh(a: ChshArgs, json: bool) -> Result<(), CliError> {
    if let Some(path) = &a.log {
        return RunSummary::from_log(&read_log(path)?)?.emit(json);
    }
    let rho = a.rho.expect("clap requires --log or --rho");
    if rho.iter().any(|r| !(-1.0..=1.0).contains(r)) {
        return Err(CliError::Usage("correlations must lie in [-1, 1]".into()));
    }
    let s = chsh_from_rho(rho);
    let out = RhoOutput { rho, chsh: s, local_bound: 2.0, exceeds_local_bound: s.abs() > 2.0 };
    if json {
        print_json(&out)
    } else {
        render::rho(&out);
        Ok(())
    }
}

#[derive(Debug, Serialize)]
pub struct FineOutput {
    pub mode: &'static str,
    pub table: ProbabilityTable,
    pub report: FineReport,
}

/// Strategies whose output depends only on the grid phase of `λ` get an
/// exact table; others are averaged over sampled draws.
fn phase_only(name: &str) -> bool {
    let base = name.trim_start_matches("neg:");
    matches!(base, "sign" | "const-plus" | "const-minus" | "memory-flip")
}

pub fn fine(a: FineArgs, json: bool) -> Result<(), CliError> {
    let grid = SettingGrid::new(a.grid)?;
    let fp = four_point(grid, a.alice_deg, a.bob_deg)?;
    let out = if let Some(path) = &a.log {
        let log = read_log(path)?;
        let counts = CountTable::from_trials(&log.trials, &log.config.four_point);
        FineOutput { mode: "empirical", table: counts.to_table()?, report: fine_check_counts(&counts, a.z)? }
    } else {
        let table = if let Some(path) = &a.table {
            let text = fs::read_to_string(path)?;
            serde_json::from_str::<ProbabilityTable>(&text)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
        } else if a.singlet {
            ProbabilityTable::singlet(&grid, &fp)
        } else {
            let names = a.strategies.as_ref().expect("clap requires a table source");
            let bob_name = resolve_bob_name(&names[0], &names[1]);
            let alice = builtin(&names[0], grid)?;
            let bob = builtin(&bob_name, grid)?;
            if phase_only(&names[0]) && phase_only(&bob_name) {
                ProbabilityTable::from_phase_shifts(alice.as_ref(), bob.as_ref(), &grid, &fp)
            } else {
                ProbabilityTable::from_strategies(alice.as_ref(), bob.as_ref(), &fp, &sample_lambdas(42, 100_000))?
            }
        };
        FineOutput { mode: "exact", report: fine_check(&table), table }
    };
    if let Some(path) = &a.write_table {
        fs::write(path, serde_json::to_string_pretty(&out.table)?)?;
    }
    if json {
        print_json(&out)
    } else {
        render::fine(&out);
        Ok(())
    }
}

pub fn boole(a: BooleArgs, json: bool) -> Result<(), CliError> {
    let report = boole_check(a.p, a.q, a.r)?;
    if json {
        print_json(&report)
    } else {
        render::boole(&report);
        Ok(())
    }
}

/// `:9000` means every interface.
fn listen_address(text: &str) -> String {
    if text.starts_with(':') {
        format!("0.0.0.0{text}")
    } else {
        text.to_string()
    }
}

fn connect_address(text: &str) -> String {
    if text.starts_with(':') {
        format!("127.0.0.1{text}")
    } else {
        text.to_string()
    }
}

pub fn serve(a: ServeArgs, json: bool) -> Result<(), CliError> {
    let mut config = run_config(&a.run)?;
    config.transport = Transport::Sockets;
    config.validate()?;
    if config.oracle.is_some() {
        return Err(CliError::Usage("the singlet oracle is nonlocal and cannot be served to stations".into()));
    }
    if !(a.timeout > 0.0 && a.timeout.is_finite()) {
        return Err(CliError::Usage(format!("timeout must be positive, got {}", a.timeout)));
    }
    let referee = Referee::bind(listen_address(&a.listen))?.with_trial_timeout(Duration::from_secs_f64(a.timeout));
    eprintln!("listening on {}", referee.local_addr()?);
    let run = referee.run(&config)?;
    if let Some(path) = &a.out {
        write_log(&run.log, path)?;
    }
    RunSummary::from_log(&run.log)?.emit(json)
}

#[derive(Debug, Serialize)]
pub struct StationOutput {
    pub role: Role,
    pub strategy: Option<String>,
    pub trials: u64,
}

pub fn station(a: StationArgs, json: bool) -> Result<(), CliError> {
    let addr = connect_address(&a.connect);
    let out = match a.role {
        RoleArg::Source => StationOutput { role: Role::Source, strategy: None, trials: run_source(addr.as_str())? },
        RoleArg::Alice | RoleArg::Bob => {
            let role = if a.role == RoleArg::Alice { Role::Alice } else { Role::Bob };
            let s = run_station(addr.as_str(), role, a.strategy.as_deref())?;
            StationOutput { role, strategy: Some(s.strategy), trials: s.trials }
        }
    };
    if json {
        print_json(&out)
    } else {
        render::station(&out);
        Ok(())
    }
}

pub fn replay(a: ReplayArgs, json: bool) -> Result<(), CliError> {
    let log = read_log(&a.log)?;
    let report = replay_verify(&log)?;
    if json {
        print_json(&report)?;
    } else {
        render::replay(&report);
    }
    if report.matches {
        Ok(())
    } else {
        Err(CliError::Failed(match report.first_mismatch {
            Some(n) => format!("replay differs from the log at trial {n}"),
            None => "stored digest does not match the trials".into(),
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn listen_shorthand() {
        assert_eq!(listen_address(":9000"), "0.0.0.0:9000");
        assert_eq!(listen_address("10.0.0.1:1"), "10.0.0.1:1");
        assert_eq!(connect_address(":9000"), "127.0.0.1:9000");
    }
}
