//! Command-line front end.
//!
//! Exit status is 0 on success, 1 for bad input, usage or contract errors and
//! 2 for internal errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::analysis::{
    analyze_bundle, analyze_kernel, analyze_redundancy, detect_complementary, diff_bundles,
    KernelBundle, KernelOutcome,
};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::io::{
    self, emit_plot, emit_report, read_bundle, read_pair_dataset, read_params, write_bundle,
    write_report,
};
use crate::io::report::{AnalyzeReport, ComplementaryReport, DiffReport, ProbeReport, RedundancyReport};
use crate::kernel_lab::{synth_kernel, SynthSpec, Window};
use crate::probe::{build_pairs, evaluate, run_directprobe, PairTask, ProbeConfig, ProbeStatus};
use crate::spectral::{compute_spectrum, Direction, Kernel};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INTERNAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "kernelscope", version, about = "Spectral analysis of SSM convolution kernels and representation probing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify every kernel of a bundle.
    Analyze {
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write one SVG spectrum per kernel into this directory.
        #[arg(long)]
        plots: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Per-kernel spectral shift between two checkpoints.
    Diff {
        #[arg(long)]
        before: PathBuf,
        #[arg(long)]
        after: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Forward/backward complementarity per layer, printed to stdout.
    Complementary {
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Spectral similarity of same-layer kernels, printed to stdout.
    Redundancy {
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Materialize kernels from a state-space parameter file.
    Materialize {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        length: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a one-layer bundle holding a windowed-sinc reference filter.
    Synth {
        #[arg(long = "class", value_enum)]
        class: SynthClass,
        /// Cutoff, or the lower band edge for `band`.
        #[arg(long)]
        cutoff: f64,
        /// Upper band edge; required for `band`.
        #[arg(long = "cutoff-high")]
        cutoff_high: Option<f64>,
        #[arg(long)]
        length: usize,
        #[arg(long, value_enum, default_value_t = WindowArg::Hamming)]
        window: WindowArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Cluster training pairs and score held-out pairs.
    Probe {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        eval: PathBuf,
        #[arg(long, value_enum)]
        task: TaskArg,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Plot the spectrum of one kernel as SVG.
    Plot {
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long)]
        layer: u32,
        #[arg(long, value_enum)]
        direction: DirectionArg,
        #[arg(long, default_value_t = 0)]
        index: u32,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SynthClass {
    Low,
    High,
    Band,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum WindowArg {
    Hamming,
    Rectangular,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TaskArg {
    Distance,
    Siblings,
    Dfg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DirectionArg {
    Forward,
    Backward,
}

impl From<DirectionArg> for Direction {
    fn from(d: DirectionArg) -> Self {
        match d {
            DirectionArg::Forward => Direction::Forward,
            DirectionArg::Backward => Direction::Backward,
        }
    }
}

impl From<TaskArg> for PairTask {
    fn from(t: TaskArg) -> Self {
        match t {
            TaskArg::Distance => PairTask::Distance,
            TaskArg::Siblings => PairTask::Siblings,
            TaskArg::Dfg => PairTask::DfgEdge,
        }
    }
}

/// Parses `argv` (program name first), runs the command and returns the exit
/// status. Diagnostics go to stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_input_error() {
                EXIT_INPUT
            } else {
                EXIT_INTERNAL
            }
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Io {
                path: p.to_path_buf(),
                source: e,
            })?;
            RunConfig::from_json(&text).map_err(|e| Error::Format {
                path: p.to_path_buf(),
                message: e.to_string(),
            })
        }
    }
}

fn print_stdout(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| Error::Io {
            path: PathBuf::from("<stdout>"),
            source: e,
        })
}

fn plot_name(kernel: &Kernel) -> String {
    format!(
        "layer{:03}_{}_{}.svg",
        kernel.layer(),
        kernel.direction(),
        kernel.kernel_index()
    )
}

fn plot_kernel(kernel: &Kernel, outcome: &KernelOutcome, model_tag: &str) -> Option<String> {
    let summary = outcome.summary()?;
    let title = format!(
        "{model_tag} layer {} {} kernel {}",
        kernel.layer(),
        kernel.direction(),
        kernel.kernel_index()
    );
    Some(emit_plot(&compute_spectrum(kernel), summary, &title))
}

fn write_plots(bundle: &KernelBundle, config: &RunConfig, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })?;
    for kernel in bundle.kernels() {
        let outcome = analyze_kernel(kernel, config)?;
        if let Some(svg) = plot_kernel(kernel, &outcome, bundle.model_tag()) {
            io::atomic_write(&dir.join(plot_name(kernel)), svg.as_bytes())?;
        }
    }
    Ok(())
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Analyze {
            bundle,
            out,
            plots,
            config,
        } => {
            let config = load_config(config.as_deref())?;
            let bundle = read_bundle(&bundle)?;
            let layers = analyze_bundle(&bundle, &config)?;
            write_report(&AnalyzeReport::new(bundle.model_tag(), &config, &layers), &out)?;
            if let Some(dir) = plots {
                write_plots(&bundle, &config, &dir)?;
            }
            Ok(())
        }
        Command::Diff {
            before,
            after,
            out,
            config,
        } => {
            let config = load_config(config.as_deref())?;
            let before = read_bundle(&before)?;
            let after = read_bundle(&after)?;
            let shift = diff_bundles(&before, &after, &config)?;
            write_report(&DiffReport::new(before.model_tag(), after.model_tag(), &shift), &out)
        }
        Command::Complementary { bundle, config } => {
            let config = load_config(config.as_deref())?;
            let bundle = read_bundle(&bundle)?;
            let report = detect_complementary(&analyze_bundle(&bundle, &config)?)?;
            print_stdout(&emit_report(&ComplementaryReport::new(bundle.model_tag(), &report))?)
        }
        Command::Redundancy { bundle, config } => {
            let config = load_config(config.as_deref())?;
            let bundle = read_bundle(&bundle)?;
            let pairs = analyze_redundancy(&bundle, &config)?;
            let report = RedundancyReport::new(bundle.model_tag(), config.redundancy_cutoff, &pairs);
            print_stdout(&emit_report(&report)?)
        }
        Command::Materialize { params, length, out } => {
            let bundle = read_params(&params)?.materialize(length)?;
            write_bundle(&bundle, &out)
        }
        Command::Synth {
            class,
            cutoff,
            cutoff_high,
            length,
            window,
            out,
        } => {
            let spec = match class {
                SynthClass::Low => SynthSpec::low_pass(cutoff, length),
                SynthClass::High => SynthSpec::high_pass(cutoff, length),
                SynthClass::Band => {
                    let high = cutoff_high.ok_or_else(|| {
                        Error::Contract("--cutoff-high is required for --class band".into())
                    })?;
                    SynthSpec::band_pass(cutoff, high, length)
                }
            };
            let spec = spec.with_window(match window {
                WindowArg::Hamming => Window::Hamming,
                WindowArg::Rectangular => Window::Rectangular,
            });
            let kernel = synth_kernel(&spec)?;
            let tag = format!("synth-{}", spec.target);
            let kernels = Direction::BOTH
                .iter()
                .map(|&d| kernel.clone().relabel(1, d, 0).map(|k| k.with_tag(tag.clone())))
                .collect::<Result<Vec<_>>>()?;
            write_bundle(&KernelBundle::from_kernels(tag.clone(), kernels)?, &out)
        }
        Command::Probe {
            train,
            eval,
            task,
            out,
            config,
        } => {
            let config = load_config(config.as_deref())?;
            let task = PairTask::from(task);
            let train_set = read_pair_dataset(&train)?;
            let eval_set = read_pair_dataset(&eval)?;
            let train_pairs = build_pairs(&train_set.representations, &train_set.pairs, task)?;
            let eval_pairs = build_pairs(&eval_set.representations, &eval_set.pairs, task)?;
            let probe_config = ProbeConfig {
                separability_tolerance: config.separability_tolerance,
                merge_budget_factor: config.merge_budget_factor,
            };
            let result = run_directprobe(&train_pairs.points, &probe_config)?;
            let evaluation = match result.status {
                ProbeStatus::Converged => Some(evaluate(&result, &eval_pairs.points)?),
                ProbeStatus::NonConverged => None,
            };
            let report = ProbeReport::new(
                task,
                (train_pairs.points.len(), train_pairs.skipped),
                (eval_pairs.points.len(), eval_pairs.skipped),
                &result,
                evaluation.as_ref(),
            );
            write_report(&report, &out)?;
            if evaluation.is_none() {
                return Err(Error::Contract(format!(
                    "clustering did not converge within {} merge attempts; report written without evaluation",
                    result.merge_attempts
                )));
            }
            Ok(())
        }
        Command::Plot {
            bundle,
            layer,
            direction,
            index,
            out,
        } => {
            let config = RunConfig::default();
            let bundle = read_bundle(&bundle)?;
            let direction = Direction::from(direction);
            let kernel = bundle
                .layer(layer)
                .and_then(|l| l.direction(direction).get(index as usize))
                .ok_or(Error::MissingKernel {
                    layer,
                    direction,
                    index,
                })?;
            let outcome = analyze_kernel(kernel, &config)?;
            let svg = plot_kernel(kernel, &outcome, bundle.model_tag()).ok_or_else(|| {
                Error::Degenerate(format!(
                    "layer {layer} {direction} kernel {index} is all zero; nothing to plot"
                ))
            })?;
            io::atomic_write(&out, svg.as_bytes())
        }
    }
}
