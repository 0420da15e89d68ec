//! Experiment harness around the navgrid simulator: every subcommand runs a
//! study and writes one deterministic TSV table.

mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};

use navgrid::{
    check_shortcut_distribution, derive_seed, estimate_edt, estimate_exponent,
    estimate_exponent_two_scales, find_r_opt, sweep_over_n, sweep_over_r, threshold_study,
    value_grid, Coord, EstimateConfig, Error as CoreError, GridParams, SweepRow,
    ThresholdStudyConfig, SIX_DEGREES_SCENARIOS,
};
use table::{emit_tsv, OutputTable, Value};

#[derive(Parser, Debug)]
#[command(
    name = "navgrid",
    about = "Monte Carlo experiments for greedy routing on an augmented grid",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Estimate the expected delivery time of one grid family
    Edt(EdtArgs),
    /// Sweep the exponent r at a fixed grid size
    SweepR(SweepRArgs),
    /// Sweep the grid size n at a fixed exponent
    SweepN(SweepNArgs),
    /// Search for the delivery-optimal exponent (golden section)
    Ropt(RoptArgs),
    /// r_opt plus the exponent range staying within the e_2 / 2e_2 budgets
    Thresholds(ThresholdsArgs),
    /// Delivery exponent between power-of-two grid sizes
    Exponent(ExponentArgs),
    /// Six-degrees scenarios: neighborhood of ~600 split three ways
    Sixdeg(SixdegArgs),
    /// Check the rejection sampler against the exact distribution
    ValidateSampler(ValidateArgs),
}

#[derive(Args, Debug)]
struct CommonOpts {
    /// Master seed (derived from the clock and echoed when absent)
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for the Monte Carlo runs (default: machine parallelism)
    #[arg(long)]
    workers: Option<usize>,
    /// Write the table to FILE instead of standard output
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

impl CommonOpts {
    fn config(&self, runs: u64) -> EstimateConfig {
        let mut config = EstimateConfig::new(runs, self.seed.unwrap_or_else(clock_seed));
        if let Some(workers) = self.workers {
            config = config.with_workers(workers);
        }
        config
    }
}

fn clock_seed() -> u64 {
    let nanos = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_nanos() as u64)
        .unwrap_or(0);
    derive_seed(nanos, 0)
}

#[derive(Args, Debug)]
struct EdtArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    r: f64,
    #[arg(long, default_value_t = 1)]
    p: u32,
    #[arg(long, default_value_t = 1)]
    q: u32,
    #[arg(long, default_value_t = 10_000)]
    runs: u64,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args, Debug)]
struct SweepRArgs {
    #[arg(long)]
    n: u32,
    #[arg(long, default_value_t = 0.0)]
    r_from: f64,
    #[arg(long, default_value_t = 3.0)]
    r_to: f64,
    #[arg(long, default_value_t = 0.1)]
    r_step: f64,
    #[arg(long, default_value_t = 1)]
    p: u32,
    #[arg(long, default_value_t = 1)]
    q: u32,
    #[arg(long, default_value_t = 10_000)]
    runs: u64,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args, Debug)]
struct SweepNArgs {
    #[arg(long)]
    r: f64,
    /// Comma-separated grid sizes, e.g. 128,256,512
    #[arg(long, value_delimiter = ',', required = true)]
    n_list: Vec<u32>,
    #[arg(long, default_value_t = 1)]
    p: u32,
    #[arg(long, default_value_t = 1)]
    q: u32,
    #[arg(long, default_value_t = 10_000)]
    runs: u64,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args, Debug)]
struct RoptArgs {
    #[arg(long)]
    n: u32,
    #[arg(long, default_value_t = 0.5)]
    r_from: f64,
    #[arg(long, default_value_t = 2.5)]
    r_to: f64,
    #[arg(long, default_value_t = 0.02)]
    tol: f64,
    #[arg(long, default_value_t = 1)]
    p: u32,
    #[arg(long, default_value_t = 1)]
    q: u32,
    /// Minima need extra accuracy; the default is ten times the usual runs
    #[arg(long, default_value_t = 100_000)]
    runs: u64,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args, Debug)]
struct ThresholdsArgs {
    #[arg(long)]
    n: u32,
    #[arg(long, default_value_t = 1)]
    p: u32,
    #[arg(long, default_value_t = 1)]
    q: u32,
    #[arg(long, default_value_t = 10_000)]
    runs: u64,
    /// Runs for the r_opt search inside the study
    #[arg(long, default_value_t = 100_000)]
    opt_runs: u64,
    /// Bisection tolerance on the crossings
    #[arg(long, default_value_t = 0.01)]
    tol: f64,
    /// Golden-section tolerance on r_opt
    #[arg(long, default_value_t = 0.02)]
    opt_tol: f64,
    /// Outer exponent range searched for crossings
    #[arg(long, default_value_t = 0.0)]
    r_from: f64,
    #[arg(long, default_value_t = 3.0)]
    r_to: f64,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args, Debug)]
struct ExponentArgs {
    /// Single exponent to estimate at (alternative to an r range)
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    r_from: Option<f64>,
    #[arg(long)]
    r_to: Option<f64>,
    #[arg(long, default_value_t = 0.25)]
    r_step: f64,
    #[arg(long, default_value_t = 1 << 14)]
    n_low: u32,
    /// Optional middle size; when set, slopes for both scale ranges are reported
    #[arg(long)]
    n_mid: Option<u32>,
    #[arg(long, default_value_t = 1 << 18)]
    n_high: u32,
    #[arg(long, default_value_t = 1)]
    p: u32,
    #[arg(long, default_value_t = 1)]
    q: u32,
    #[arg(long, default_value_t = 10_000)]
    runs: u64,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args, Debug)]
struct SixdegArgs {
    #[arg(long, default_value_t = navgrid::SIX_DEGREES_N)]
    n: u32,
    #[arg(long, default_value_t = 0.0)]
    r_from: f64,
    #[arg(long, default_value_t = 3.0)]
    r_to: f64,
    #[arg(long, default_value_t = 0.1)]
    r_step: f64,
    /// Override the scenario list with a single custom (p, q) split
    #[arg(long, requires = "q")]
    p: Option<u32>,
    #[arg(long, requires = "p")]
    q: Option<u32>,
    #[arg(long, default_value_t = 10_000)]
    runs: u64,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    /// Grid sizes to validate (kept small: the oracle enumerates n^2 nodes)
    #[arg(long, value_delimiter = ',', default_values_t = [2u32, 4, 8, 16])]
    n_list: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.5, 1.0, 2.0, 3.0])]
    r_list: Vec<f64>,
    /// Minimum accepted draws per configuration (raised automatically until
    /// sampling noise is well below the bound)
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    /// Total-variation bound for a pass
    #[arg(long, default_value_t = 0.005)]
    tv_tol: f64,
    #[command(flatten)]
    common: CommonOpts,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            match err {
                CliError::Core(CoreError::InvalidParameter { name, reason }) => {
                    eprintln!("error: --{name}: {reason}");
                }
                CliError::Core(other) => eprintln!("error: {other}"),
                CliError::Io(io_err) => eprintln!("error: {io_err}"),
            }
            ExitCode::from(2)
        }
    }
}

enum CliError {
    Core(CoreError),
    Io(io::Error),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

fn run(command: Command) -> Result<ExitCode, CliError> {
    let (table, out, exit) = match command {
        Command::Edt(args) => run_edt(args)?,
        Command::SweepR(args) => run_sweep_r(args)?,
        Command::SweepN(args) => run_sweep_n(args)?,
        Command::Ropt(args) => run_ropt(args)?,
        Command::Thresholds(args) => run_thresholds(args)?,
        Command::Exponent(args) => run_exponent(args)?,
        Command::Sixdeg(args) => run_sixdeg(args)?,
        Command::ValidateSampler(args) => run_validate(args)?,
    };
    write_table(&table, out.as_deref())?;
    Ok(exit)
}

fn write_table(table: &OutputTable, out: Option<&std::path::Path>) -> io::Result<()> {
    match out {
        Some(path) => {
            let mut writer = BufWriter::new(File::create(path)?);
            emit_tsv(table, &mut writer)?;
            writer.flush()
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            emit_tsv(table, &mut lock)
        }
    }
}

type CommandOutput = (OutputTable, Option<PathBuf>, ExitCode);

fn base_meta(table: &mut OutputTable, command: &str, config: &EstimateConfig) {
    table.meta("command", command);
    table.meta("runs", config.runs);
    table.meta("seed", config.seed);
    table.meta("workers", config.workers);
}

fn sweep_row_values(row: &SweepRow, leading: Value, order: &[&str]) -> Vec<Value> {
    let mut values = vec![leading];
    for column in order {
        values.push(match *column {
            "delivery" => Value::Real(row.mean_hops),
            "stderr" => Value::Real(row.std_error),
            "accept_rate" => Value::Real(row.acceptance_rate),
            "overhead" => Value::Real(1.0 / row.acceptance_rate),
            "time" => Value::Real(row.wall_time_seconds),
            other => unreachable!("unknown column {other}"),
        });
    }
    values
}

fn run_edt(args: EdtArgs) -> Result<CommandOutput, CliError> {
    let config = args.common.config(args.runs);
    let params = GridParams::new(args.n, args.r, args.p, args.q)?;
    let est = estimate_edt(&params, &config)?;

    let mut table = OutputTable::new(vec!["delivery", "stderr", "accept_rate", "time"]);
    base_meta(&mut table, "edt", &config);
    table.meta("n", args.n);
    table.meta("r", args.r);
    table.meta("p", args.p);
    table.meta("q", args.q);
    table.push_row(vec![
        Value::Real(est.mean_hops),
        Value::Real(est.std_error),
        Value::Real(est.acceptance_rate),
        Value::Real(est.wall_time_seconds),
    ]);
    Ok((table, args.common.out, ExitCode::SUCCESS))
}

fn run_sweep_r(args: SweepRArgs) -> Result<CommandOutput, CliError> {
    if args.r_step <= 0.0 {
        return Err(CoreError::InvalidParameter {
            name: "r-step",
            reason: "step must be positive".into(),
        }
        .into());
    }
    let config = args.common.config(args.runs);
    let grid = value_grid(args.r_from, args.r_to, args.r_step);

    let mut table = OutputTable::new(vec!["r", "delivery", "stderr", "accept_rate", "overhead"]);
    base_meta(&mut table, "sweep-r", &config);
    table.meta("n", args.n);
    table.meta("r-from", args.r_from);
    table.meta("r-to", args.r_to);
    table.meta("r-step", args.r_step);
    table.meta("p", args.p);
    table.meta("q", args.q);

    for (r, row) in sweep_over_r(args.n, &grid, args.p, args.q, &config) {
        match row {
            Ok(row) => table.push_row(sweep_row_values(
                &row,
                Value::Real(r),
                &["delivery", "stderr", "accept_rate", "overhead"],
            )),
            Err(err) => eprintln!("warning: r = {r}: {err}"),
        }
    }
    Ok((table, args.common.out, ExitCode::SUCCESS))
}

fn run_sweep_n(args: SweepNArgs) -> Result<CommandOutput, CliError> {
    let config = args.common.config(args.runs);

    let mut table = OutputTable::new(vec!["n", "time", "delivery", "stderr", "accept_rate"]);
    base_meta(&mut table, "sweep-n", &config);
    table.meta("r", args.r);
    table.meta(
        "n-list",
        args.n_list
            .iter()
            .map(u32::to_string)
            .collect::<Vec<_>>()
            .join(","),
    );
    table.meta("p", args.p);
    table.meta("q", args.q);

    for (n, row) in sweep_over_n(args.r, &args.n_list, args.p, args.q, &config) {
        match row {
            Ok(row) => table.push_row(sweep_row_values(
                &row,
                Value::Int(n as i64),
                &["time", "delivery", "stderr", "accept_rate"],
            )),
            Err(err) => eprintln!("warning: n = {n}: {err}"),
        }
    }
    Ok((table, args.common.out, ExitCode::SUCCESS))
}

fn run_ropt(args: RoptArgs) -> Result<CommandOutput, CliError> {
    let config = args.common.config(args.runs);
    let start = Instant::now();
    let r_opt = find_r_opt(
        args.n,
        args.p,
        args.q,
        (args.r_from, args.r_to),
        args.tol,
        &config,
    )?;
    let elapsed = start.elapsed().as_secs_f64();
    let at_opt = estimate_edt(&GridParams::new(args.n, r_opt, args.p, args.q)?, &config)?;

    let mut table = OutputTable::new(vec!["n", "r_opt", "delivery", "time"]);
    base_meta(&mut table, "ropt", &config);
    table.meta("n", args.n);
    table.meta("r-from", args.r_from);
    table.meta("r-to", args.r_to);
    table.meta("tol", args.tol);
    table.meta("p", args.p);
    table.meta("q", args.q);
    table.push_row(vec![
        Value::Int(args.n as i64),
        Value::Real(r_opt),
        Value::Real(at_opt.mean_hops),
        Value::Real(elapsed),
    ]);
    Ok((table, args.common.out, ExitCode::SUCCESS))
}

fn run_thresholds(args: ThresholdsArgs) -> Result<CommandOutput, CliError> {
    let config = args.common.config(args.runs);
    let study = ThresholdStudyConfig {
        opt_tol: args.opt_tol,
        opt_runs: args.opt_runs,
        interval: (args.r_from, args.r_to),
        tol: args.tol,
        ..ThresholdStudyConfig::default()
    };
    let result = threshold_study(args.n, args.p, args.q, &study, &config)?;

    let mut table = OutputTable::new(vec![
        "n",
        "r_opt",
        "r_min_e2",
        "r_min_2e2",
        "r_max_2e2",
        "e2",
    ]);
    base_meta(&mut table, "thresholds", &config);
    table.meta("n", args.n);
    table.meta("p", args.p);
    table.meta("q", args.q);
    table.meta("tol", args.tol);
    table.meta("opt-tol", args.opt_tol);
    table.meta("opt-runs", args.opt_runs);
    table.push_row(vec![
        Value::Int(result.n as i64),
        Value::Real(result.r_opt),
        Value::Real(result.r_min_e2),
        Value::Real(result.r_min_2e2),
        Value::Real(result.r_max_2e2),
        Value::Real(result.e2_reference),
    ]);
    Ok((table, args.common.out, ExitCode::SUCCESS))
}

fn run_exponent(args: ExponentArgs) -> Result<CommandOutput, CliError> {
    let config = args.common.config(args.runs);
    let exponents: Vec<f64> = match (args.r, args.r_from, args.r_to) {
        (Some(r), None, None) => vec![r],
        (None, Some(from), Some(to)) => value_grid(from, to, args.r_step),
        _ => {
            return Err(CoreError::InvalidParameter {
                name: "r",
                reason: "give either --r or both --r-from and --r-to".into(),
            }
            .into())
        }
    };

    let header = if args.n_mid.is_some() {
        vec!["r", "alpha_low", "alpha_high"]
    } else {
        vec!["r", "alpha"]
    };
    let mut table = OutputTable::new(header);
    base_meta(&mut table, "exponent", &config);
    table.meta("n-low", args.n_low);
    if let Some(mid) = args.n_mid {
        table.meta("n-mid", mid);
    }
    table.meta("n-high", args.n_high);
    table.meta("p", args.p);
    table.meta("q", args.q);

    for &r in &exponents {
        match args.n_mid {
            Some(mid) => {
                let est = estimate_exponent_two_scales(
                    r, args.n_low, mid, args.n_high, args.p, args.q, &config,
                )?;
                table.push_row(vec![
                    Value::Real(r),
                    Value::Real(est.alpha_low_scale),
                    Value::Real(est.alpha_high_scale),
                ]);
            }
            None => {
                let alpha =
                    estimate_exponent(r, args.n_low, args.n_high, args.p, args.q, &config)?;
                table.push_row(vec![Value::Real(r), Value::Real(alpha)]);
            }
        }
    }
    Ok((table, args.common.out, ExitCode::SUCCESS))
}

fn run_sixdeg(args: SixdegArgs) -> Result<CommandOutput, CliError> {
    if args.r_step <= 0.0 {
        return Err(CoreError::InvalidParameter {
            name: "r-step",
            reason: "step must be positive".into(),
        }
        .into());
    }
    let config = args.common.config(args.runs);
    let grid = value_grid(args.r_from, args.r_to, args.r_step);

    let scenarios: Vec<(u32, u32)> = match (args.p, args.q) {
        (Some(p), Some(q)) => vec![(p, q)],
        _ => SIX_DEGREES_SCENARIOS.to_vec(),
    };

    let mut table = OutputTable::new(vec!["p", "q", "r", "delivery", "stderr", "accept_rate"]);
    base_meta(&mut table, "sixdeg", &config);
    table.meta("n", args.n);
    table.meta("r-from", args.r_from);
    table.meta("r-to", args.r_to);
    table.meta("r-step", args.r_step);

    for (index, &(p, q)) in scenarios.iter().enumerate() {
        let scenario_config = EstimateConfig {
            seed: derive_seed(config.seed, 0x6de9 + index as u64),
            ..config
        };
        for (r, row) in sweep_over_r(args.n, &grid, p, q, &scenario_config) {
            match row {
                Ok(row) => {
                    let mut values = vec![Value::Int(p as i64), Value::Int(q as i64)];
                    values.extend(sweep_row_values(
                        &row,
                        Value::Real(r),
                        &["delivery", "stderr", "accept_rate"],
                    ));
                    table.push_row(values);
                }
                Err(err) => eprintln!("warning: p={p} q={q} r={r}: {err}"),
            }
        }
    }
    Ok((table, args.common.out, ExitCode::SUCCESS))
}

fn run_validate(args: ValidateArgs) -> Result<CommandOutput, CliError> {
    let seed = args.common.seed.unwrap_or_else(clock_seed);

    let mut table = OutputTable::new(vec![
        "n",
        "r",
        "ux",
        "uy",
        "samples",
        "tv",
        "accept_rate",
        "pass",
    ]);
    table.meta("command", "validate-sampler");
    table.meta("samples", args.samples);
    table.meta("tv-tol", args.tv_tol);
    table.meta("seed", seed);

    let mut all_pass = true;
    let mut index = 0u64;
    for &n in &args.n_list {
        let half = (n / 2) as i64;
        let origins = [
            Coord::new(0, 0),
            Coord::new(half, 0),
            Coord::new(half, half),
        ];
        for &origin in &origins {
            for &r in &args.r_list {
                let check = check_shortcut_distribution(
                    n,
                    r,
                    origin,
                    args.samples,
                    args.tv_tol,
                    derive_seed(seed, index),
                )?;
                index += 1;
                let pass = check.tv_distance < args.tv_tol && check.acceptance_rate > 0.125;
                all_pass &= pass;
                table.push_row(vec![
                    Value::Int(n as i64),
                    Value::Real(r),
                    Value::Int(origin.x),
                    Value::Int(origin.y),
                    Value::Int(check.samples as i64),
                    Value::Real(check.tv_distance),
                    Value::Real(check.acceptance_rate),
                    Value::Int(pass as i64),
                ]);
            }
        }
    }
    let exit = if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    };
    Ok((table, args.common.out, exit))
}
