use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use laser_noise::gillespie::{self, GillespieConfig, DEFAULT_EVENT_BUDGET};
use laser_noise::langevin::{self, LangevinConfig, LinearLangevin};
use laser_noise::sweeps::{self, Column, Grid, Spacing, SweepSpec, SweptVariable};
use laser_noise::verify::{self, VerifyOptions};
use laser_noise::{model, noise, report};
use laser_noise::{DeviceParams, Error, OperatingPoint, TrajectoryStats, ELEMENTARY_CHARGE};
use serde_json::{json, Value};

mod output;

use output::{Format, Report};

/// Environment variable naming the device file used when no device flag is given.
const DEVICE_ENV: &str = "LASER_NOISE_DEVICE";

#[derive(Debug, Parser)]
#[command(
    name = "laser-noise",
    version,
    about = "Steady state, threshold and photon-number noise of a single-mode laser",
    after_help = "Without a device flag the file named by LASER_NOISE_DEVICE is used, \
                  and failing that the `default` preset."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Stationary photon and excitation numbers at one pump rate
    Steady {
        #[command(flatten)]
        device: DeviceArgs,
        #[command(flatten)]
        pump: PumpArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Transparency and threshold pump rates and photon numbers
    Thresholds {
        #[command(flatten)]
        device: DeviceArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Photon-number variance at one operating point
    Noise {
        #[command(flatten)]
        device: DeviceArgs,
        #[command(flatten)]
        pump: PumpArgs,
        /// Stationary photon number instead of a pump rate
        #[arg(long, value_name = "N", conflicts_with_all = ["j", "current_ma", "j_over_jth"])]
        n_bar: Option<f64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Photon number and pump rate where the variance falls to half thermal
    NoiseThreshold {
        #[command(flatten)]
        device: DeviceArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Spontaneous-emission regime of the device and its asymptotes
    Regime {
        #[command(flatten)]
        device: DeviceArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Evaluate columns over a grid of pump rate, beta or photon number
    Sweep(SweepArgs),
    /// Noise threshold against beta for the semiconductor material
    Fig1 {
        #[command(flatten)]
        grid: BetaGridArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Noise-threshold current margin against beta for the semiconductor material
    Fig2 {
        #[command(flatten)]
        grid: BetaGridArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Simulate the linearized Langevin equations
    SimLangevin {
        #[command(flatten)]
        device: DeviceArgs,
        #[command(flatten)]
        pump: PumpArgs,
        /// Operating photon number; defaults to the noise threshold
        #[arg(long, value_name = "N", conflicts_with_all = ["j", "current_ma", "j_over_jth"])]
        n_bar: Option<f64>,
        /// Total number of steps, burn-in included
        #[arg(long, default_value_t = 10_000_000)]
        steps: u64,
        /// Step in seconds; defaults to a fraction of the fastest rate
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Simulate the jump process exactly (Gillespie direct method)
    SimGillespie {
        #[command(flatten)]
        device: DeviceArgs,
        #[command(flatten)]
        pump: PumpArgs,
        /// Simulated time in seconds; defaults to about --events events
        #[arg(long, value_name = "SECONDS")]
        t_max: Option<f64>,
        /// Run length in expected events when --t-max is absent
        #[arg(long, default_value_t = 1e7)]
        events: f64,
        /// Initial interval excluded from statistics, in seconds;
        /// defaults to min(50 tau_sp, 5% of t_max)
        #[arg(long, value_name = "SECONDS")]
        burn_in: Option<f64>,
        /// Independent trajectories pooled into one estimate
        #[arg(long, default_value_t = 1)]
        trajectories: u64,
        /// Refuse runs expected to exceed this many events per trajectory
        #[arg(long, default_value_t = DEFAULT_EVENT_BUDGET)]
        budget: f64,
        /// Write the first trajectory as CSV (t_seconds,N,n)
        #[arg(long, value_name = "PATH")]
        dump: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run the acceptance checks and print a pass/fail table
    Verify {
        /// Device for the stochastic checks
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(DeviceParams::PRESETS))]
        preset: Option<String>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
struct DeviceArgs {
    /// Device parameter file (JSON)
    #[arg(long, value_name = "PATH", conflicts_with_all = ["preset", "beta", "nt", "tau_sp", "tau_cav"])]
    device: Option<PathBuf>,
    /// Named device
    #[arg(
        long,
        conflicts_with_all = ["beta", "nt", "tau_sp", "tau_cav"],
        value_parser = clap::builder::PossibleValuesParser::new(DeviceParams::PRESETS)
    )]
    preset: Option<String>,
    /// Spontaneous emission factor (inline device; needs --nt, --tau-sp, --tau-cav)
    #[arg(long, requires_all = ["nt", "tau_sp", "tau_cav"])]
    beta: Option<f64>,
    /// Transparency excitation number N_T
    #[arg(long, requires = "beta")]
    nt: Option<f64>,
    /// Spontaneous lifetime in seconds
    #[arg(long, requires = "beta")]
    tau_sp: Option<f64>,
    /// Cavity photon lifetime in seconds
    #[arg(long, requires = "beta")]
    tau_cav: Option<f64>,
}

#[derive(Debug, Args)]
#[group(id = "pump", multiple = false)]
struct PumpArgs {
    /// Pump rate in carriers per second
    #[arg(long)]
    j: Option<f64>,
    /// Pump current in milliamperes
    #[arg(long = "current-mA", value_name = "MA")]
    current_ma: Option<f64>,
    /// Pump rate as a multiple of the threshold pump rate
    #[arg(long, value_name = "X")]
    j_over_jth: Option<f64>,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output file; standard output when absent
    #[arg(long, short, value_name = "PATH")]
    output: Option<PathBuf>,
    /// Output format (tables default to csv, reports to json)
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Omit the tool version and other metadata
    #[arg(long)]
    no_metadata: bool,
}

#[derive(Debug, Args)]
struct BetaGridArgs {
    #[arg(long, default_value_t = 1e-12)]
    beta_min: f64,
    #[arg(long, default_value_t = 0.1)]
    beta_max: f64,
    #[arg(long, default_value_t = 60)]
    points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Variable {
    PumpRate,
    Beta,
    PhotonNumber,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SpacingArg {
    Log,
    Linear,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    device: DeviceArgs,
    /// Sweep specification file (JSON); replaces the grid and device flags
    #[arg(
        long,
        value_name = "PATH",
        conflicts_with_all = ["device", "preset", "beta", "variable", "min", "max", "points", "spacing", "columns", "relative"]
    )]
    spec: Option<PathBuf>,
    #[arg(long, value_enum)]
    variable: Option<Variable>,
    #[arg(long, required_unless_present = "spec")]
    min: Option<f64>,
    #[arg(long, required_unless_present = "spec")]
    max: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long, value_enum)]
    spacing: Option<SpacingArg>,
    /// Grid bounds in units of j_th (pump rate) or n_th (photon number)
    #[arg(long)]
    relative: bool,
    /// Comma-separated column tags
    #[arg(long, value_delimiter = ',')]
    columns: Vec<String>,
    /// Sweep beta with N_T and tau_cav fixed instead of the material constants
    #[arg(long)]
    no_hold_material: bool,
    /// Operating point of beta sweeps, in units of each row's j_th
    #[arg(long, default_value_t = 2.0)]
    pump_over_threshold: f64,
    #[command(flatten)]
    out: OutputArgs,
}

enum Failure {
    Usage(String),
    Domain(Error),
    /// Reported already; only the exit code is left.
    Silent,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn usage<T>(msg: impl Into<String>) -> Outcome<T> {
    Err(Failure::Usage(msg.into()))
}

impl DeviceArgs {
    fn resolve(&self) -> Outcome<DeviceParams> {
        if let Some(path) = &self.device {
            return Ok(DeviceParams::from_json_file(path)?);
        }
        if let Some(name) = &self.preset {
            return Ok(DeviceParams::preset(name)?);
        }
        if let (Some(beta), Some(nt), Some(tau_sp), Some(tau_cav)) = (self.beta, self.nt, self.tau_sp, self.tau_cav) {
            return Ok(DeviceParams::new(beta, nt, tau_sp, tau_cav)?);
        }
        match std::env::var_os(DEVICE_ENV) {
            Some(path) if !path.is_empty() => Ok(DeviceParams::from_json_file(path)?),
            _ => Ok(DeviceParams::reference()),
        }
    }
}

impl PumpArgs {
    fn given(&self) -> bool {
        self.j.is_some() || self.current_ma.is_some() || self.j_over_jth.is_some()
    }

    fn resolve(&self, device: &DeviceParams) -> Outcome<f64> {
        match (self.j, self.current_ma, self.j_over_jth) {
            (Some(j), _, _) => Ok(j),
            (_, Some(ma), _) => Ok(ma * 1e-3 / ELEMENTARY_CHARGE),
            (_, _, Some(x)) => Ok(x * model::threshold_current(device)?),
            _ => usage("a pump is required: --j, --current-mA or --j-over-jth"),
        }
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

fn emit(report: Report, out: &OutputArgs) -> Outcome<()> {
    output::emit(report, out.format, out.output.as_deref(), !out.no_metadata)?;
    Ok(())
}

fn operating_point(device: &DeviceParams, pump: &PumpArgs, n_bar: Option<f64>) -> Outcome<OperatingPoint> {
    match n_bar {
        Some(n) => {
            let j = model::current_for_photon_number(device, n)?;
            Ok(OperatingPoint {
                pump: j,
                photons: n,
                excitations: model::steady_state(device, j)?.excitations,
            })
        }
        None => Ok(model::steady_state(device, pump.resolve(device)?)?),
    }
}

fn stats_record(channel: &str, s: &TrajectoryStats, seed: u64, config: Value) -> Value {
    json!({
        "channel": channel,
        "mean": s.mean,
        "variance": s.variance,
        "std_error": s.std_error,
        "variance_std_error": s.variance_std_error,
        "tau_decorr_s": s.decorrelation_time,
        "samples": s.sample_count,
        "seed": seed,
        "config": config,
    })
}

fn sweep_spec(args: &SweepArgs) -> Outcome<SweepSpec> {
    if let Some(path) = &args.spec {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        return Ok(serde_json::from_str(&text).map_err(Error::from)?);
    }
    let device = args.device.resolve()?;
    let variable = match args.variable.unwrap_or(Variable::PumpRate) {
        Variable::PumpRate => SweptVariable::PumpRate,
        Variable::Beta => SweptVariable::Beta,
        Variable::PhotonNumber => SweptVariable::PhotonNumber,
    };
    let (mut min, mut max) = (args.min.unwrap_or(f64::NAN), args.max.unwrap_or(f64::NAN));
    if args.relative {
        let unit = match variable {
            SweptVariable::PumpRate => model::threshold_current(&device)?,
            SweptVariable::PhotonNumber => model::threshold_photon_number(&device)?,
            SweptVariable::Beta => return usage("--relative does not apply to beta sweeps"),
        };
        min *= unit;
        max *= unit;
    }
    let grid = Grid {
        min,
        max,
        points: args.points.unwrap_or(50),
        spacing: match args.spacing {
            Some(SpacingArg::Linear) => Spacing::Linear,
            _ => Spacing::Log,
        },
    };
    let columns = if args.columns.is_empty() {
        match variable {
            SweptVariable::PumpRate => vec![
                Column::Pump,
                Column::CurrentMilliamps,
                Column::PumpOverThreshold,
                Column::Photons,
                Column::Excitations,
                Column::Variance,
                Column::Ratio,
                Column::Fano,
            ],
            SweptVariable::PhotonNumber => vec![
                Column::Photons,
                Column::Pump,
                Column::CurrentMilliamps,
                Column::Variance,
                Column::Ratio,
                Column::Fano,
            ],
            SweptVariable::Beta => vec![
                Column::Beta,
                Column::InvBeta,
                Column::Regime,
                Column::ThresholdPhotons,
                Column::NoiseThreshold,
                Column::Margin,
            ],
        }
    } else {
        let mut cols = Vec::new();
        for tag in &args.columns {
            match tag.parse::<Column>() {
                Ok(c) => cols.push(c),
                Err(_) => {
                    let known: Vec<&str> = Column::ALL.iter().map(|c| c.tag()).collect();
                    return usage(format!("unknown column `{tag}`; known: {}", known.join(", ")));
                }
            }
        }
        cols
    };
    Ok(SweepSpec {
        hold_material: !args.no_hold_material,
        pump_over_threshold: args.pump_over_threshold,
        ..SweepSpec::new(variable, grid, device, columns)
    })
}

fn beta_grid(args: &BetaGridArgs) -> Outcome<Vec<f64>> {
    Ok(sweeps::log_grid(args.beta_min, args.beta_max, args.points)?)
}

fn sim_langevin(
    device: &DeviceParams,
    pump: &PumpArgs,
    n_bar: Option<f64>,
    steps: u64,
    dt: Option<f64>,
    seed: u64,
) -> Outcome<Report> {
    let photons = match n_bar {
        Some(n) => n,
        None if pump.given() => operating_point(device, pump, None)?.photons,
        None => noise::noise_threshold_photon(device)?.photons,
    };
    let system = LinearLangevin::from_params(device, photons)?;
    let mut config = LangevinConfig::for_system(&system, steps, seed);
    if let Some(dt) = dt {
        let burn_in = config.burn_in_steps as f64 * config.dt;
        config.dt = dt;
        config.burn_in_steps = ((burn_in / dt).ceil() as u64).min(steps / 2);
    }
    let stats = langevin::simulate_linear(&system, &config, [0.0, 0.0])?;
    let mut cfg = to_value(&config);
    cfg["n_bar"] = json!(photons);
    cfg["device"] = device.to_json();
    let closed = noise::photon_variance_closed_form(device, photons)?;
    cfg["closed_form_variance"] = json!(closed.variance);
    Ok(Report::Records(vec![
        stats_record("dn", &stats.photons, seed, cfg.clone()),
        stats_record("dN", &stats.excitations, seed, cfg),
    ]))
}

struct GillespieArgs<'a> {
    t_max: Option<f64>,
    events: f64,
    burn_in: Option<f64>,
    trajectories: u64,
    budget: f64,
    dump: Option<&'a Path>,
    seed: u64,
}

fn sim_gillespie(device: &DeviceParams, pump: &PumpArgs, args: GillespieArgs) -> Outcome<Report> {
    let j = pump.resolve(device)?;
    let p = model::steady_state(device, j)?;
    let t_max = match args.t_max {
        Some(t) => t,
        None => {
            let rate: f64 = gillespie::propensities(device, j, p.excitations.round() as u64, p.photons.round() as u64)
                .iter()
                .sum();
            args.events / rate
        }
    };
    let burn_in = args.burn_in.unwrap_or((50.0 * device.tau_sp()).min(0.05 * t_max));
    let config = GillespieConfig {
        event_budget: args.budget,
        ..GillespieConfig::near_steady_state(device, j, t_max, burn_in, args.seed)?
    };
    let stats = match args.dump {
        Some(path) => {
            let file = File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            let mut io_error = None;
            writeln!(w, "t_seconds,N,n").map_err(Error::from)?;
            let first = gillespie::simulate_gillespie_with(device, j, &config, |t, big_n, n| {
                if io_error.is_none() {
                    if let Err(e) = writeln!(w, "{},{big_n},{n}", sweeps::format_number(t)) {
                        io_error = Some(e);
                    }
                }
            })?;
            if let Some(e) = io_error {
                return Err(Error::from(e).into());
            }
            w.flush().map_err(Error::from)?;
            if args.trajectories > 1 {
                gillespie::simulate_gillespie_ensemble(device, j, &config, args.trajectories)?
            } else {
                first
            }
        }
        None => gillespie::simulate_gillespie_ensemble(device, j, &config, args.trajectories)?,
    };
    let mut cfg = to_value(&config);
    cfg["j"] = json!(j);
    cfg["current_mA"] = json!(j * ELEMENTARY_CHARGE * 1e3);
    cfg["trajectories"] = json!(args.trajectories);
    cfg["events"] = json!(stats.events);
    cfg["device"] = device.to_json();
    cfg["steady_state"] = json!({"n_bar": p.photons, "N_bar": p.excitations});
    Ok(Report::Records(vec![
        stats_record("n", &stats.photons, args.seed, cfg.clone()),
        stats_record("N", &stats.excitations, args.seed, cfg),
    ]))
}

fn run(cli: Cli) -> Outcome<()> {
    match cli.command {
        Command::Steady { device, pump, out } => {
            let d = device.resolve()?;
            let j = pump.resolve(&d)?;
            emit(Report::Record(to_value(&report::steady(&d, j)?)), &out)
        }
        Command::Thresholds { device, out } => {
            let d = device.resolve()?;
            emit(Report::Record(to_value(&report::thresholds(&d)?)), &out)
        }
        Command::Noise { device, pump, n_bar, out } => {
            let d = device.resolve()?;
            let p = operating_point(&d, &pump, n_bar)?;
            emit(Report::Record(to_value(&report::noise_at(&d, &p)?)), &out)
        }
        Command::NoiseThreshold { device, out } => {
            let d = device.resolve()?;
            emit(Report::Record(to_value(&report::noise_threshold(&d)?)), &out)
        }
        Command::Regime { device, out } => {
            let d = device.resolve()?;
            emit(Report::Record(to_value(&report::regime(&d)?)), &out)
        }
        Command::Sweep(args) => {
            let spec = sweep_spec(&args)?;
            emit(Report::Table(sweeps::run_sweep(&spec)?), &args.out)
        }
        Command::Fig1 { grid, out } => emit(Report::Table(sweeps::figure1_data(&beta_grid(&grid)?)?), &out),
        Command::Fig2 { grid, out } => emit(Report::Table(sweeps::figure2_data(&beta_grid(&grid)?)?), &out),
        Command::SimLangevin {
            device,
            pump,
            n_bar,
            steps,
            dt,
            seed,
            out,
        } => {
            let d = device.resolve()?;
            emit(sim_langevin(&d, &pump, n_bar, steps, dt, seed)?, &out)
        }
        Command::SimGillespie {
            device,
            pump,
            t_max,
            events,
            burn_in,
            trajectories,
            budget,
            dump,
            seed,
            out,
        } => {
            let d = device.resolve()?;
            let args = GillespieArgs {
                t_max,
                events,
                burn_in,
                trajectories,
                budget,
                dump: dump.as_deref(),
                seed,
            };
            emit(sim_gillespie(&d, &pump, args)?, &out)
        }
        Command::Verify { preset, seed } => {
            let outcomes = verify::run_all(&VerifyOptions { seed, preset })?;
            for o in &outcomes {
                println!("{}", o.line());
            }
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            println!("{} passed, {failed} failed", outcomes.len() - failed);
            if failed == 0 {
                Ok(())
            } else {
                Err(Failure::Silent)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => Cli::command()
            .error(clap::error::ErrorKind::ArgumentConflict, msg)
            .exit(),
        Err(Failure::Domain(e)) => {
            eprintln!("{}", json!({"error": e.kind(), "message": e.to_string()}));
            ExitCode::from(1)
        }
        Err(Failure::Silent) => ExitCode::from(1),
    }
}
