//! Command-line front end for the pilot design simulator.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use pilotopt::conventional::{conventional_estimate_with, design_reuse_pilots, Receiver};
use pilotopt::harness::{
    convergence_csv, convergence_series, convergence_trace, pilot_length_series, snr_series, svg_line_chart,
    sweep_csv, sweep_pilot_length, sweep_snr, write_output, ExperimentConfig, Mode, OutputFormat,
    NOISE_STREAM_OFFSET,
};
use pilotopt::model::{
    generate_channel, generate_noise, paper_gains, read_value_list, received_pilot_signal, sigma2_from_snr,
};
use pilotopt::numerics::RandomStream;
use pilotopt::optimizer::{
    analytic_wsmse, initial_pilots, objective, optimize_pilots, proposed_estimate, InitScheme,
};
use pilotopt::{Error, Result, SystemConfig};

#[derive(Parser)]
#[command(name = "pilotopt", version, about = "Pilot optimization and channel estimation for massive MIMO")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Normalized WSMSE against SNR
    SweepSnr(CommonArgs),
    /// Normalized WSMSE against pilot length (give several values to --n)
    SweepN(CommonArgs),
    /// Optimizer objective after every single-user update, for each initialization
    Convergence(CommonArgs),
    /// Optimize pilots and write the pilot matrix
    Optimize(CommonArgs),
    /// Estimate one channel realization with both estimators
    Estimate(CommonArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Profile {
    /// M=32, K=8, N=4, 5000 trials
    Desk,
    /// M=128, K=32, N=16, 20000 trials
    Paper,
}

#[derive(Clone, Copy, ValueEnum)]
enum InitArg {
    DftReuse,
    DftK,
    Random,
    /// All three (convergence only)
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Proposed,
    Conventional,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReceiverArg {
    Standard,
    ContaminationAware,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
    Svg,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Preset supplying defaults for M, K, N and trials
    #[arg(long, value_enum, default_value = "desk")]
    profile: Profile,
    /// Base-station antennas
    #[arg(long)]
    m: Option<usize>,
    /// Users (defaults to the profile, or to the gains file length)
    #[arg(long)]
    k: Option<usize>,
    /// Pilot length; a comma list for sweep-n
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    /// SNR values in dB, comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    snr_db: Vec<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Gains file (one per line), or "paper" for the 32 reference gains
    #[arg(long, default_value = "paper")]
    gains: String,
    /// Common power budget, or a file with one budget per user
    #[arg(long, default_value = "1")]
    power: String,
    #[arg(long, value_enum, default_value = "dft-reuse")]
    init: InitArg,
    #[arg(long, value_enum, default_value = "both")]
    mode: ModeArg,
    /// Shrinkage scalar of the conventional estimator
    #[arg(long, value_enum, default_value = "standard")]
    receiver: ReceiverArg,
    #[arg(long, default_value_t = pilotopt::optimizer::DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = pilotopt::optimizer::DEFAULT_MAX_SWEEPS)]
    max_sweeps: usize,
    /// Output file (stdout if omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    /// Skip the Monte Carlo; report analytic values only
    #[arg(long)]
    analytic_only: bool,
    /// Worker threads for the Monte Carlo (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
}

impl CommonArgs {
    fn gains(&self, k: Option<usize>) -> Result<Vec<f64>> {
        if self.gains == "paper" {
            let all = paper_gains();
            let k = k.unwrap_or(all.len());
            if k > all.len() {
                return Err(Error::Config(format!(
                    "reference gains cover {} users, K = {k} requested; pass --gains <file>",
                    all.len()
                )));
            }
            return Ok(all.into_iter().take(k).collect());
        }
        let g = read_value_list(Path::new(&self.gains))?;
        match k {
            Some(k) if k != g.len() => Err(Error::Config(format!(
                "gains file {} has {} values, K = {k}",
                self.gains,
                g.len()
            ))),
            _ => Ok(g),
        }
    }

    fn powers(&self, k: usize) -> Result<Vec<f64>> {
        if let Ok(p) = self.power.parse::<f64>() {
            if !(p > 0.0 && p.is_finite()) {
                return Err(Error::Config(format!("power {p} must be positive")));
            }
            return Ok(vec![p; k]);
        }
        let p = read_value_list(Path::new(&self.power))?;
        if p.len() != k {
            return Err(Error::Config(format!("power file has {} values, K = {k}", p.len())));
        }
        Ok(p)
    }

    fn experiment(&self, default_snr: Vec<f64>) -> Result<ExperimentConfig> {
        let mut exp = match self.profile {
            Profile::Desk => ExperimentConfig::desk(),
            Profile::Paper => ExperimentConfig::paper(),
        };
        let k = match (self.k, self.gains.as_str()) {
            (Some(k), _) => Some(k),
            (None, "paper") => Some(exp.system.k),
            (None, _) => None,
        };
        let gains = self.gains(k)?;
        let k = gains.len();
        let powers = self.powers(k)?;
        let n = match self.n.as_slice() {
            [] => exp.system.n.min(k),
            [n] => *n,
            many => many[0],
        };
        if !self.n.is_empty() {
            exp.n_list = self.n.clone();
        } else {
            exp.n_list.retain(|&v| v <= k);
        }
        exp.system = SystemConfig::new(self.m.unwrap_or(exp.system.m), k, n, 1.0, powers, gains)?;
        exp.snr_db_list = if self.snr_db.is_empty() {
            default_snr
        } else {
            self.snr_db.clone()
        };
        if let Some(t) = self.trials {
            exp.trials = t;
        }
        exp.seed = self.seed;
        exp.mode = match self.mode {
            ModeArg::Proposed => Mode::Proposed,
            ModeArg::Conventional => Mode::Conventional,
            ModeArg::Both => Mode::Both,
        };
        exp.init = match self.init {
            InitArg::DftReuse | InitArg::All => InitScheme::DftReuse,
            InitArg::DftK => InitScheme::DftKTruncated,
            InitArg::Random => InitScheme::Random,
        };
        exp.receiver = match self.receiver {
            ReceiverArg::Standard => Receiver::Standard,
            ReceiverArg::ContaminationAware => Receiver::ContaminationAware,
        };
        exp.tol = self.tol;
        exp.max_sweeps = self.max_sweeps;
        exp.analytic_only = self.analytic_only;
        exp.validate()?;
        Ok(exp)
    }

    fn format(&self) -> OutputFormat {
        match self.format {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
            FormatArg::Svg => OutputFormat::Svg,
        }
    }

    fn single_n(&self) -> Result<()> {
        if self.n.len() > 1 {
            return Err(Error::Config("this command takes a single --n value".into()));
        }
        Ok(())
    }

    fn single_snr(exp: &ExperimentConfig) -> Result<f64> {
        match exp.snr_db_list.as_slice() {
            [s] => Ok(*s),
            _ => Err(Error::Config("this command takes a single --snr-db value".into())),
        }
    }
}

fn json<T: serde::Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|source| Error::Json {
            path: PathBuf::from("<json>"),
            source,
        })
}

fn run(cli: Cli) -> Result<()> {
    let (Command::SweepSnr(args)
    | Command::SweepN(args)
    | Command::Convergence(args)
    | Command::Optimize(args)
    | Command::Estimate(args)) = &cli.command;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(&cli.command))
}

fn dispatch(command: &Command) -> Result<()> {
    match command {
        Command::SweepSnr(args) => {
            args.single_n()?;
            let exp = args.experiment(pilotopt::harness::default_snr_grid())?;
            let rows = sweep_snr(&exp)?;
            let text = match args.format() {
                OutputFormat::Csv => sweep_csv(&rows)?,
                OutputFormat::Json => json(&rows)?,
                OutputFormat::Svg => svg_line_chart(
                    &format!("K={}, N={}", exp.system.k, exp.system.n),
                    "SNR (dB)",
                    "normalized WSMSE",
                    &snr_series(&rows),
                    true,
                ),
            };
            write_output(args.out.as_deref(), &text)
        }
        Command::SweepN(args) => {
            let exp = args.experiment(vec![0.0, 10.0])?;
            let rows = sweep_pilot_length(&exp)?;
            let text = match args.format() {
                OutputFormat::Csv => sweep_csv(&rows)?,
                OutputFormat::Json => json(&rows)?,
                OutputFormat::Svg => svg_line_chart(
                    &format!("K={}", exp.system.k),
                    "pilot length N",
                    "normalized WSMSE",
                    &pilot_length_series(&rows),
                    true,
                ),
            };
            write_output(args.out.as_deref(), &text)
        }
        Command::Convergence(args) => {
            args.single_n()?;
            let exp = args.experiment(vec![0.0])?;
            let snr = CommonArgs::single_snr(&exp)?;
            let inits: Vec<InitScheme> = match args.init {
                InitArg::All => InitScheme::ALL.to_vec(),
                _ => vec![exp.init],
            };
            let runs = convergence_trace(&exp, snr, &inits)?;
            for r in &runs {
                eprintln!(
                    "{:>9}: final objective {:.12e}, {} updates, within 1e-6 after {:.3} sweeps",
                    r.init.label(),
                    r.trace.final_objective(),
                    r.trace.updates(),
                    r.trace.sweeps_to_within(1e-6)
                );
            }
            let text = match args.format() {
                OutputFormat::Csv => convergence_csv(&runs),
                OutputFormat::Json => json(&runs)?,
                OutputFormat::Svg => svg_line_chart(
                    &format!("K={}, N={}, SNR={snr} dB", exp.system.k, exp.system.n),
                    "update index",
                    "tr(A^-1)",
                    &convergence_series(&runs),
                    true,
                ),
            };
            write_output(args.out.as_deref(), &text)
        }
        Command::Optimize(args) => {
            args.single_n()?;
            let exp = args.experiment(vec![0.0])?;
            let snr = CommonArgs::single_snr(&exp)?;
            let cfg = exp.system.with_sigma2(sigma2_from_snr(snr, &exp.system.powers));
            let init = initial_pilots(exp.init, &cfg, exp.seed);
            let (x, trace) = optimize_pilots(&cfg, &init, exp.tol, exp.max_sweeps)?;
            let report = analytic_wsmse(&x, &cfg)?;
            eprintln!(
                "objective {:.12e} -> {:.12e} in {} sweeps (converged: {}); normalized WSMSE {:.12e}",
                trace.initial_objective,
                objective(&x, &cfg)?,
                trace.sweeps_completed,
                trace.converged,
                report.normalized
            );
            write_output(args.out.as_deref(), &x.to_text())
        }
        Command::Estimate(args) => {
            args.single_n()?;
            let exp = args.experiment(vec![0.0])?;
            let snr = CommonArgs::single_snr(&exp)?;
            let cfg = exp.system.with_sigma2(sigma2_from_snr(snr, &exp.system.powers));
            estimate_once(&exp, &cfg, args)
        }
    }
}

#[derive(serde::Serialize)]
struct UserError {
    user: usize,
    gain: f64,
    proposed: f64,
    conventional: f64,
}

fn estimate_once(exp: &ExperimentConfig, cfg: &SystemConfig, args: &CommonArgs) -> Result<()> {
    let (x_conv, reuse) = design_reuse_pilots(cfg.n, cfg.k, &cfg.powers)?;
    let init = initial_pilots(exp.init, cfg, exp.seed);
    let (x_opt, _) = optimize_pilots(cfg, &init, exp.tol, exp.max_sweeps)?;

    let h = generate_channel(cfg, &mut RandomStream::new(exp.seed, 0));
    let noise = generate_noise(cfg, &mut RandomStream::new(exp.seed, NOISE_STREAM_OFFSET));
    let y_opt = received_pilot_signal(&h, &x_opt, &noise)?;
    let y_conv = received_pilot_signal(&h, &x_conv, &noise)?;
    let est_opt = proposed_estimate(&y_opt, &x_opt, cfg)?;
    let est_conv = conventional_estimate_with(&y_conv, &x_conv, cfg, &reuse, exp.receiver)?;

    let err = |est: &pilotopt::ChannelMatrix, k: usize| -> f64 {
        est.0
            .column(k)
            .iter()
            .zip(h.0.column(k))
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            / (cfg.m as f64 * cfg.gains[k])
    };
    let rows: Vec<UserError> = (0..cfg.k)
        .map(|k| UserError {
            user: k,
            gain: cfg.gains[k],
            proposed: err(&est_opt, k),
            conventional: err(&est_conv, k),
        })
        .collect();
    let text = match args.format() {
        OutputFormat::Json => json(&rows)?,
        _ => {
            let mut s = String::from("user,gain,proposed,conventional\n");
            for r in &rows {
                s.push_str(&format!("{},{},{},{}\n", r.user, r.gain, r.proposed, r.conventional));
            }
            s
        }
    };
    write_output(args.out.as_deref(), &text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
