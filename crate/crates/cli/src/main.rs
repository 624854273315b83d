//! `cifc`: projections, frontier traces and verification suites from the
//! command line.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use cifc_core::channel::{validate_channel, Channel};
use cifc_core::polytope::{project_or_empty, Polytope2D};
use cifc_core::probability::JointDistribution;
use cifc_core::region::{builtin_schema, instantiate, manifest, SchemaId};
use cifc_core::verification::{
    run_suite, trace_frontier_with, FrontierOptions, Suite, VerifyOptions,
};

#[derive(Debug, Parser)]
#[command(
    name = "cifc",
    version,
    about = "Rate regions of the cognitive interference channel"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a channel file (and optionally a distribution file).
    Validate {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        dist: Option<PathBuf>,
    },
    /// Project one schema at one distribution onto (R1, R2).
    Project {
        #[arg(long)]
        schema: SchemaId,
        /// Needed unless the distribution already contains the outputs.
        #[arg(long)]
        channel: Option<PathBuf>,
        #[arg(long)]
        dist: PathBuf,
        #[command(flatten)]
        out: Output,
        /// Defaults to csv for a `.csv` output path, json otherwise.
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Trace the boundary of a schema's region over input distributions.
    Frontier {
        #[arg(long)]
        schema: SchemaId,
        #[arg(long)]
        channel: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Evaluations per weight.
        #[arg(long, default_value_t = 2000, value_parser = clap::value_parser!(u64).range(1..))]
        budget: u64,
        /// Number of weights on [0, 1].
        #[arg(long, default_value_t = 21, value_parser = clap::value_parser!(u64).range(1..))]
        grid: u64,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Run a verification suite and write its JSON report.
    Verify {
        #[arg(long)]
        suite: Suite,
        /// Distributions per identity check.
        #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        /// Non-empty instances per region comparison.
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        region_samples: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9)]
        tol_mi: f64,
        #[arg(long, default_value_t = 1e-7)]
        tol_region: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Dump the schema to equation-label audit map.
    Manifest {
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Debug, Args)]
struct Output {
    /// Output file; standard output if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Failure classes mapped to exit codes.
enum Failure {
    Violation(String),
    Input(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

fn read(path: &Path, what: &str) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {what} file {}", path.display()))
}

fn load_channel(path: &Path) -> Result<Channel> {
    let c = Channel::from_json(&read(path, "channel")?)
        .with_context(|| format!("invalid channel file {}", path.display()))?;
    validate_channel(&c).with_context(|| format!("invalid channel file {}", path.display()))?;
    Ok(c)
}

fn load_dist(path: &Path) -> Result<JointDistribution> {
    JointDistribution::from_json(&read(path, "distribution")?)
        .with_context(|| format!("invalid distribution file {}", path.display()))
}

fn emit(out: &Output, text: &str) -> Result<()> {
    match &out.out {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn with_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn project(
    schema: SchemaId,
    channel: Option<&Path>,
    dist: &Path,
    out: &Output,
    format: Option<Format>,
) -> Result<()> {
    let s = builtin_schema(schema)?;
    let d = load_dist(dist)?;
    let outputs = [s.binding.y1.as_str(), s.binding.y2.as_str()];
    let has_outputs = outputs.iter().all(|y| d.rvs().contains(y));
    let d = match (channel, has_outputs) {
        (Some(c), false) => {
            let c = load_channel(c)?;
            cifc_core::probability::extend_through_channel_as(&d, &c, &s.binding).with_context(
                || format!("distribution {} does not fit the channel", dist.display()),
            )?
        }
        (None, true) => d,
        (Some(_), true) => bail!(
            "distribution {} already contains {} and {}; drop --channel",
            dist.display(),
            outputs[0],
            outputs[1]
        ),
        (None, false) => bail!(
            "distribution {} has no outputs {} and {}; pass --channel",
            dist.display(),
            outputs[0],
            outputs[1]
        ),
    };
    let system = instantiate(&s, &d).with_context(|| {
        format!(
            "distribution {} does not fit schema {schema}",
            dist.display()
        )
    })?;
    let region = project_or_empty(&system)?.unwrap_or(Polytope2D {
        vertices: Vec::new(),
        halfplanes: Vec::new(),
    });
    let csv = match format {
        Some(f) => matches!(f, Format::Csv),
        None => out
            .out
            .as_ref()
            .and_then(|p| p.extension())
            .is_some_and(|e| e.eq_ignore_ascii_case("csv")),
    };
    let text = if csv {
        region.to_csv()
    } else {
        with_newline(region.to_json()?)
    };
    emit(out, &text)
}

fn run(cli: Cli) -> std::result::Result<(), Failure> {
    match cli.command {
        Command::Validate { channel, dist } => {
            let c = load_channel(&channel)?;
            let [x1, x2, y1, y2] = c.sizes();
            println!(
                "channel {}: |X1|={x1} |X2|={x2} |Y1|={y1} |Y2|={y2}",
                channel.display()
            );
            if let Some(d) = dist {
                let d = load_dist(&d)?;
                let names = d.rvs().names().join(", ");
                println!("distribution: {names}");
            }
        }
        Command::Project {
            schema,
            channel,
            dist,
            out,
            format,
        } => project(schema, channel.as_deref(), &dist, &out, format)?,
        Command::Frontier {
            schema,
            channel,
            seed,
            budget,
            grid,
            alpha,
            out,
        } => {
            let c = load_channel(&channel)?;
            let opts = FrontierOptions {
                budget: budget as usize,
                grid: grid as usize,
                seed,
                channel_id: channel.display().to_string(),
                alpha,
                warm_starts: Vec::new(),
            };
            let f = trace_frontier_with(schema, &c, &opts).map_err(anyhow::Error::from)?;
            emit(&out, &f.to_csv())?;
        }
        Command::Verify {
            suite,
            samples,
            region_samples,
            seed,
            tol_mi,
            tol_region,
            out,
        } => {
            for (name, t) in [("--tol-mi", tol_mi), ("--tol-region", tol_region)] {
                if !(t >= 0.0 && t.is_finite()) {
                    return Err(Failure::Input(anyhow!(
                        "{name} must be a nonnegative number"
                    )));
                }
            }
            let opts = VerifyOptions {
                samples: samples as usize,
                region_samples: region_samples as usize,
                seed,
                tol_mi,
                tol_region,
            };
            let reports = run_suite(suite, &opts).map_err(anyhow::Error::from)?;
            let text = serde_json::to_string_pretty(&reports).map_err(anyhow::Error::from)?;
            emit(&out, &with_newline(text))?;
            let failed: Vec<String> = reports
                .iter()
                .flat_map(|r| {
                    r.checks
                        .iter()
                        .filter(|c| !c.passed && !c.diagnostic)
                        .map(move |c| {
                            format!(
                                "{}: {} (max {:e}, seed {:?})",
                                r.suite, c.id, c.max_violation, c.worst_seed
                            )
                        })
                })
                .collect();
            if !failed.is_empty() {
                return Err(Failure::Violation(failed.join("\n")));
            }
        }
        Command::Manifest { out } => {
            let m = manifest().map_err(anyhow::Error::from)?;
            let text = serde_json::to_string_pretty(&m).map_err(anyhow::Error::from)?;
            emit(&out, &with_newline(text))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violation(msg)) => {
            eprintln!("violations found:\n{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
