use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cavity_entangle::model::AtomicProductState;
use cavity_entangle::sector::Discriminant;
use cavity_entangle::selfcheck::{self, SelfcheckOptions};
use cavity_entangle::sweep::{self, NamedState, Preset, RunSpec};
use cavity_entangle::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_SELFCHECK: u8 = 2;

/// Negativity dynamics of two dipole-coupled atoms, one inside a thermal cavity.
#[derive(Debug, Parser)]
#[command(name = "cavity-entangle", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute negativity curves and write them as CSV.
    Run(Box<RunArgs>),
    /// Run the built-in verification suites.
    Selfcheck(SelfcheckArgs),
}

#[derive(Debug, Default, Args)]
struct RunArgs {
    /// Flat `key = value` file; keys are the long flag names without the leading `--`.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Figure preset: fig1a, fig1b, fig1c, fig1d, fig2 or fig3.
    #[arg(long)]
    preset: Option<String>,
    /// Mean thermal photon number.
    #[arg(long, allow_hyphen_values = true)]
    nbar: Option<f64>,
    /// Dipole coupling J/g.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// Mixing angle of atom 1 in cos(theta)|+> + e^{i phi} sin(theta)|->.
    #[arg(long, allow_hyphen_values = true)]
    theta1: Option<f64>,
    /// Mixing angle of atom 2.
    #[arg(long, allow_hyphen_values = true)]
    theta2: Option<f64>,
    /// Relative phase of atom 1.
    #[arg(long, allow_hyphen_values = true)]
    phi1: Option<f64>,
    /// Relative phase of atom 2.
    #[arg(long, allow_hyphen_values = true)]
    phi2: Option<f64>,
    /// Atomic and cavity frequency in units of g.
    #[arg(long, allow_hyphen_values = true)]
    omega: Option<f64>,
    /// Final time in units of 1/g.
    #[arg(long)]
    tmax: Option<f64>,
    /// Number of grid points including both ends.
    #[arg(long)]
    steps: Option<usize>,
    /// Bound on the discarded thermal probability.
    #[arg(long = "tail-tol")]
    tail_tol: Option<f64>,
    /// Comma-separated list of mean photon numbers.
    #[arg(long = "sweep-nbar")]
    sweep_nbar: Option<String>,
    /// Comma-separated list of dipole ratios.
    #[arg(long = "sweep-alpha")]
    sweep_alpha: Option<String>,
    /// Add a column computed by brute force on the full space.
    #[arg(long)]
    oracle: bool,
    /// Output path; one file per cell is derived from it for sweeps.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write every cell into a single table.
    #[arg(long = "long-format")]
    long_format: bool,
}

#[derive(Debug, Args)]
struct SelfcheckArgs {
    /// Use the misprinted dressed-state discriminant in the eigenvalue suite.
    #[arg(long = "paper-vn-typo")]
    paper_vn_typo: bool,
    /// Run the truncation suite with half the certified Fock cutoff.
    #[arg(long = "halve-cutoff")]
    halve_cutoff: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Run(args) => match run(*args) {
            Ok(()) => ExitCode::SUCCESS,
            Err(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(EXIT_USAGE)
            }
        },
        Command::Selfcheck(args) => selfcheck(args),
    }
}

fn selfcheck(args: SelfcheckArgs) -> ExitCode {
    let options = SelfcheckOptions {
        discriminant: if args.paper_vn_typo {
            Discriminant::Misprinted
        } else {
            Discriminant::Corrected
        },
        halve_cutoff: args.halve_cutoff,
    };
    match selfcheck::run(&options) {
        Ok(report) => {
            for suite in &report {
                println!("{suite}");
            }
            if report.iter().all(|s| s.passed()) {
                println!("selfcheck passed");
                ExitCode::SUCCESS
            } else {
                println!("selfcheck FAILED");
                ExitCode::from(EXIT_SELFCHECK)
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(EXIT_SELFCHECK)
        }
    }
}

impl RunArgs {
    fn from_config(map: &BTreeMap<String, String>) -> Result<Self, String> {
        let mut args = RunArgs::default();
        for (key, value) in map {
            let num = || {
                value
                    .parse::<f64>()
                    .map_err(|_| format!("config `{key}`: `{value}` is not a number"))
            };
            let flag = || match value.as_str() {
                "true" | "1" | "yes" => Ok(true),
                "false" | "0" | "no" => Ok(false),
                _ => Err(format!("config `{key}`: `{value}` is not a boolean")),
            };
            match key.as_str() {
                "preset" => args.preset = Some(value.clone()),
                "nbar" => args.nbar = Some(num()?),
                "alpha" => args.alpha = Some(num()?),
                "theta1" => args.theta1 = Some(num()?),
                "theta2" => args.theta2 = Some(num()?),
                "phi1" => args.phi1 = Some(num()?),
                "phi2" => args.phi2 = Some(num()?),
                "omega" => args.omega = Some(num()?),
                "tmax" => args.tmax = Some(num()?),
                "steps" => {
                    args.steps = Some(
                        value
                            .parse()
                            .map_err(|_| format!("config `steps`: `{value}` is not an integer"))?,
                    )
                }
                "tail-tol" => args.tail_tol = Some(num()?),
                "sweep-nbar" => args.sweep_nbar = Some(value.clone()),
                "sweep-alpha" => args.sweep_alpha = Some(value.clone()),
                "oracle" => args.oracle = flag()?,
                "out" => args.out = Some(PathBuf::from(value)),
                "long-format" => args.long_format = flag()?,
                other => return Err(format!("unknown config key `{other}`")),
            }
        }
        Ok(args)
    }

    /// Field-wise merge; values already set on `self` win.
    fn or(self, fallback: RunArgs) -> RunArgs {
        RunArgs {
            config: self.config,
            preset: self.preset.or(fallback.preset),
            nbar: self.nbar.or(fallback.nbar),
            alpha: self.alpha.or(fallback.alpha),
            theta1: self.theta1.or(fallback.theta1),
            theta2: self.theta2.or(fallback.theta2),
            phi1: self.phi1.or(fallback.phi1),
            phi2: self.phi2.or(fallback.phi2),
            omega: self.omega.or(fallback.omega),
            tmax: self.tmax.or(fallback.tmax),
            steps: self.steps.or(fallback.steps),
            tail_tol: self.tail_tol.or(fallback.tail_tol),
            sweep_nbar: self.sweep_nbar.or(fallback.sweep_nbar),
            sweep_alpha: self.sweep_alpha.or(fallback.sweep_alpha),
            oracle: self.oracle || fallback.oracle,
            out: self.out.or(fallback.out),
            long_format: self.long_format || fallback.long_format,
        }
    }

    fn to_spec(&self) -> Result<RunSpec, Error> {
        let mut spec = match &self.preset {
            Some(name) => name.parse::<Preset>()?.spec(),
            None => RunSpec::default(),
        };
        if self.theta1.is_some() || self.theta2.is_some() || self.phi1.is_some() || self.phi2.is_some() {
            let state = AtomicProductState::new(
                self.theta1.unwrap_or(0.0),
                self.theta2.unwrap_or(0.0),
                self.phi1.unwrap_or(0.0),
                self.phi2.unwrap_or(0.0),
            );
            spec.states = vec![NamedState::new("custom", state)];
        }
        if let Some(list) = &self.sweep_nbar {
            spec.nbar = sweep::parse_list(list)?;
        } else if let Some(nbar) = self.nbar {
            spec.nbar = vec![nbar];
        }
        if let Some(list) = &self.sweep_alpha {
            spec.alpha = sweep::parse_list(list)?;
        } else if let Some(alpha) = self.alpha {
            spec.alpha = vec![alpha];
        }
        if let Some(omega) = self.omega {
            spec.omega = omega;
        }
        if let Some(tmax) = self.tmax {
            spec.t_max = tmax;
        }
        if let Some(steps) = self.steps {
            spec.steps = steps;
        }
        if let Some(tol) = self.tail_tol {
            spec.tail_tolerance = tol;
        }
        spec.oracle = self.oracle;
        spec.validate()?;
        Ok(spec)
    }
}

fn create(path: &PathBuf) -> Result<BufWriter<File>, String> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn run(flags: RunArgs) -> Result<(), String> {
    let args = match &flags.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            let map = sweep::parse_config(&text).map_err(|e| e.to_string())?;
            flags.or(RunArgs::from_config(&map)?)
        }
        None => flags,
    };
    let spec = args.to_spec().map_err(|e| e.to_string())?;
    let cells = spec.cells();

    // open every destination before the computation so bad paths fail fast
    enum Sink {
        Stdout,
        Single(BufWriter<File>),
        PerCell(Vec<BufWriter<File>>),
    }
    let mut sink = match (&args.out, args.long_format || cells.len() == 1) {
        (None, true) => Sink::Stdout,
        (None, false) => return Err("a sweep with several cells needs --out or --long-format".into()),
        (Some(path), true) => Sink::Single(create(path)?),
        (Some(path), false) => Sink::PerCell(
            cells
                .iter()
                .map(|c| create(&sweep::cell_path(path, c)))
                .collect::<Result<_, _>>()?,
        ),
    };

    let results = sweep::run(&spec).map_err(|e| e.to_string())?;
    let io_err = |e: io::Error| format!("write failed: {e}");
    match &mut sink {
        Sink::Stdout => {
            let mut out = io::stdout().lock();
            if args.long_format {
                sweep::write_long_csv(&results, &mut out).map_err(io_err)?;
            } else {
                sweep::write_cell_csv(&results[0], &mut out).map_err(io_err)?;
            }
        }
        Sink::Single(file) => {
            if args.long_format {
                sweep::write_long_csv(&results, file).map_err(io_err)?;
            } else {
                sweep::write_cell_csv(&results[0], file).map_err(io_err)?;
            }
            file.flush().map_err(io_err)?;
        }
        Sink::PerCell(files) => {
            for (result, file) in results.iter().zip(files.iter_mut()) {
                sweep::write_cell_csv(result, file).map_err(io_err)?;
                file.flush().map_err(io_err)?;
            }
        }
    }
    for result in &results {
        match result.oracle_gap() {
            Some(gap) => eprintln!("{} oracle_gap={gap:.3e}", result.summary()),
            None => eprintln!("{}", result.summary()),
        }
    }
    Ok(())
}
