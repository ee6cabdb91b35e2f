use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use amc_core::harness::{
    classify_stream, contour_table, cumulant_table, default_contour_grid, emit_contours, emit_records, emit_sensitivity, emit_sweeps,
    load_config, run_sensitivity, run_sweep, write_output, ClassifyMode, Experiment, Format, Preset,
};
use amc_core::synth::{read_stream, write_stream, StreamHeader};
use amc_core::{constellation::parse_candidates, synthesize, Error, ModulationType, Scenario, TransmitterSpec};

#[derive(Parser)]
#[command(name = "amc", version, about = "Cumulant-based modulation classification for multiuser channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print theoretical C42, C63 and the SUMC feature per modulation.
    Table {
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Classify a recorded stream (cf64le file).
    Classify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Sumc)]
        mode: ModeArg,
        /// Comma-separated modulation tags.
        #[arg(long, default_value = "BPSK,QPSK,PAM4,QAM16")]
        candidates: String,
        /// Number of transmitters M (MUMC); defaults to the stream header or 3.
        #[arg(long)]
        transmitters: Option<usize>,
        /// Defaults to the stream header's value, else 1.
        #[arg(long)]
        noise_variance: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Write a synthetic multiuser stream plus its header sidecar.
    Synthesize {
        /// MOD:AMPLITUDE[:SYNC_ERROR], repeatable; the first is the desired user.
        #[arg(long = "tx", required = true)]
        transmitters: Vec<String>,
        #[arg(long, default_value_t = 1.0)]
        noise_variance: f64,
        #[arg(long, default_value_t = 2000)]
        symbols: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Monte Carlo classification sweeps.
    Sweep {
        #[arg(long, value_enum, conflicts_with = "config", required_unless_present = "config")]
        preset: Option<SweepPreset>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Analytical vs Monte Carlo sensitivity to amplitude mismatch, or
    /// decision-boundary contours (fig5).
    Sensitivity {
        #[arg(long, value_enum, conflicts_with = "config", required_unless_present = "config")]
        preset: Option<SensitivityPreset>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Emit boundary contours instead of probability tables.
        #[arg(long)]
        contours: bool,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// Base seed; experiment i in the file gets SEED + i.
    #[arg(long)]
    seed: Option<u64>,
    /// Trials per class per axis point.
    #[arg(long)]
    trials: Option<usize>,
    /// Symbols per trial.
    #[arg(long)]
    symbols: Option<usize>,
    /// Worker threads (default: available cores).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Sumc,
    Baseline,
    Mumc,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepPreset {
    Fig2,
    Fig3,
    Fig7,
    Fig8,
}

#[derive(Clone, Copy, ValueEnum)]
enum SensitivityPreset {
    Fig4,
    Fig5,
    Fig6,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

impl From<ModeArg> for ClassifyMode {
    fn from(m: ModeArg) -> ClassifyMode {
        match m {
            ModeArg::Sumc => ClassifyMode::Sumc,
            ModeArg::Baseline => ClassifyMode::Baseline,
            ModeArg::Mumc => ClassifyMode::Mumc,
        }
    }
}

enum Failure {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e)
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(Failure::Usage(msg.into()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => 0,
                _ => 1,
            };
            let _ = e.print();
            return if code == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(command: Command) -> CliResult {
    match command {
        Command::Table { output } => {
            let bytes = emit_records(&cumulant_table(), output.format.into())?;
            write_output(output.out.as_deref(), &bytes)?;
        }
        Command::Classify {
            input,
            mode,
            candidates,
            transmitters,
            noise_variance,
            output,
        } => {
            let candidates = parse_candidates(&candidates).or_else(|e| usage(e.to_string()))?;
            let (stream, header) = read_stream(&input)?;
            let noise_variance = noise_variance
                .or_else(|| header.as_ref().and_then(|h| h.noise_variance))
                .unwrap_or(1.0);
            let transmitters = transmitters
                .or_else(|| header.as_ref().map(|h| h.transmitters.len()).filter(|&m| m > 0))
                .unwrap_or(3);
            let row = classify_stream(&stream, mode.into(), &candidates, transmitters, noise_variance)?;
            let bytes = emit_records(&[row], output.format.into())?;
            write_output(output.out.as_deref(), &bytes)?;
        }
        Command::Synthesize {
            transmitters,
            noise_variance,
            symbols,
            seed,
            out,
        } => {
            let transmitters = transmitters.iter().map(|s| parse_transmitter(s)).collect::<CliResult<Vec<_>>>()?;
            let scenario = Scenario {
                transmitters,
                noise_variance,
                n_symbols: symbols,
                seed,
            };
            let stream = synthesize(&scenario)?;
            write_stream(&out, &stream, Some(&StreamHeader::for_scenario(&scenario)))?;
        }
        Command::Sweep {
            preset,
            config,
            run,
            output,
        } => {
            let preset = preset.map(|p| match p {
                SweepPreset::Fig2 => Preset::Fig2,
                SweepPreset::Fig3 => Preset::Fig3,
                SweepPreset::Fig7 => Preset::Fig7,
                SweepPreset::Fig8 => Preset::Fig8,
            });
            let experiments = experiments(preset, config, &run)?;
            if let Some(e) = experiments.iter().find(|e| e.kind.is_sensitivity()) {
                return usage(format!(
                    "experiment `{}` is a sensitivity experiment; use the sensitivity subcommand",
                    e.name
                ));
            }
            let jobs = jobs(&run);
            let results = experiments.iter().map(|e| run_sweep(e, jobs)).collect::<Result<Vec<_>, _>>()?;
            write_output(output.out.as_deref(), &emit_sweeps(&results, output.format.into())?)?;
        }
        Command::Sensitivity {
            preset,
            config,
            contours,
            run,
            output,
        } => {
            let contours = contours || matches!(preset, Some(SensitivityPreset::Fig5));
            let preset = preset.map(|p| match p {
                SensitivityPreset::Fig4 => Preset::Fig4,
                SensitivityPreset::Fig5 => Preset::Fig5,
                SensitivityPreset::Fig6 => Preset::Fig6,
            });
            let experiments = experiments(preset, config, &run)?;
            if let Some(e) = experiments.iter().find(|e| !e.kind.is_sensitivity()) {
                return usage(format!(
                    "experiment `{}` is not a sensitivity experiment; use the sweep subcommand",
                    e.name
                ));
            }
            let format = output.format.into();
            let bytes = if contours {
                let [exp] = experiments.as_slice() else {
                    return usage("contours need exactly one sensitivity_2d experiment");
                };
                emit_contours(exp, &contour_table(exp, &default_contour_grid())?, format)?
            } else {
                let jobs = jobs(&run);
                let results = experiments
                    .iter()
                    .map(|e| run_sensitivity(e, jobs))
                    .collect::<Result<Vec<_>, _>>()?;
                emit_sensitivity(&results, format)?
            };
            write_output(output.out.as_deref(), &bytes)?;
        }
    }
    Ok(())
}

fn experiments(preset: Option<Preset>, config: Option<PathBuf>, run: &RunArgs) -> CliResult<Vec<Experiment>> {
    let mut exps = match (preset, config) {
        (Some(p), None) => p.experiments()?,
        (None, Some(path)) => load_config(&path)?,
        _ => return usage("give exactly one of --preset or --config"),
    };
    if run.trials == Some(0) || run.symbols == Some(0) || run.jobs == Some(0) {
        return usage("--trials, --symbols and --jobs must be at least 1");
    }
    for (i, e) in exps.iter_mut().enumerate() {
        if let Some(s) = run.seed {
            e.base_seed = s.wrapping_add(i as u64);
        }
        if let Some(t) = run.trials {
            e.n_trials = t;
        }
        if let Some(n) = run.symbols {
            e.n_symbols = n;
        }
    }
    Ok(exps)
}

fn jobs(run: &RunArgs) -> usize {
    run.jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn parse_transmitter(spec: &str) -> CliResult<TransmitterSpec> {
    let parts: Vec<&str> = spec.split(':').collect();
    if !(2..=3).contains(&parts.len()) {
        return usage(format!("transmitter `{spec}` should be MOD:AMPLITUDE[:SYNC_ERROR]"));
    }
    let modulation: ModulationType = parts[0].parse().or_else(|e: Error| usage(e.to_string()))?;
    let number = |s: &str| s.parse::<f64>().or_else(|_| usage(format!("`{s}` in `{spec}` is not a number")));
    let mut tx = TransmitterSpec::new(modulation, number(parts[1])?);
    if let Some(eps) = parts.get(2) {
        tx = tx.with_sync_error(number(eps)?);
    }
    Ok(tx)
}
