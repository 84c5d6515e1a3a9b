use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use voting_bounds::data::{load_csv, CsvOptions};
use voting_bounds::experiment::{
    cmd_doomlp, cmd_gen, cmd_rademacher, cmd_ratio, cmd_run, generate, Artifacts, BoundReport,
    DatasetKind, DoomDelta, ExperimentConfig, GenSpec,
};
use voting_bounds::{Error, Result};

#[derive(Parser)]
#[command(
    name = "voting-bounds",
    version,
    about = "Stump ensembles, margin bounds and DOOM-LP"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic labeled sample as CSV
    Gen {
        #[command(flatten)]
        gen: GenArgs,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Train and report bounds per round
    Run(ExperimentArgs),
    /// Empirical over true gamma-margin on the intervals problem
    Ratio(ExperimentArgs),
    /// Re-optimize a model's weights with DOOM-LP
    Doomlp {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[command(flatten)]
        csv: CsvArgs,
        /// margin scale, or `auto`
        #[arg(long, default_value = "auto")]
        delta: String,
        #[arg(long, default_value_t = 100)]
        draws: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Monte-Carlo Rademacher complexity of stumps on a sample
    Rademacher {
        /// labeled CSV; otherwise a generated sample
        #[arg(long)]
        data: Option<PathBuf>,
        #[command(flatten)]
        csv: CsvArgs,
        #[command(flatten)]
        gen: GenArgs,
        #[arg(long, default_value_t = 200)]
        draws: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Line chart of CSV columns
    Plot {
        #[arg(long)]
        csv: PathBuf,
        /// x column; defaults to the first
        #[arg(long)]
        x: Option<String>,
        /// comma-separated y columns; defaults to all others
        #[arg(long, value_delimiter = ',')]
        y: Vec<String>,
        #[arg(long, default_value = "")]
        title: String,
        #[arg(long, short)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Intervals,
    Twonorm,
    KrkpLike,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum, default_value = "intervals")]
    dataset: GenKind,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 20)]
    dim: usize,
    #[arg(long, default_value_t = 20)]
    num_intervals: usize,
}

impl GenArgs {
    fn spec(&self) -> GenSpec {
        GenSpec {
            kind: match self.dataset {
                GenKind::Intervals => DatasetKind::Intervals,
                GenKind::Twonorm => DatasetKind::Twonorm,
                GenKind::KrkpLike => DatasetKind::KrkpLike,
            },
            n: self.n,
            dim: self.dim,
            num_intervals: self.num_intervals,
        }
    }
}

#[derive(Args)]
struct CsvArgs {
    /// label column index; defaults to the last
    #[arg(long)]
    label_column: Option<usize>,
    #[arg(long, default_value = "1")]
    positive_label: String,
    #[arg(long)]
    no_header: bool,
}

impl CsvArgs {
    fn options(&self) -> CsvOptions {
        CsvOptions {
            label_column: self.label_column,
            positive_label: self.positive_label.clone(),
            has_header: !self.no_header,
        }
    }
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long, short)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// evaluate bounds every k-th round
    #[arg(long)]
    every: Option<usize>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

impl ExperimentArgs {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::load(&self.config)?;
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(k) = self.every {
            cfg.every = k;
        }
        if let Some(d) = &self.output_dir {
            cfg.output_dir = d.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn list(art: &Artifacts) {
    for f in &art.files {
        println!("{}", f.display());
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen { gen, seed, out } => {
            let ds = cmd_gen(&gen.spec(), seed.unwrap_or(0), &out)?;
            println!(
                "{} rows, {} features -> {}",
                ds.len(),
                ds.dim(),
                out.display()
            );
        }
        Command::Run(args) => list(&cmd_run(&args.config()?)?.1),
        Command::Ratio(args) => list(&cmd_ratio(&args.config()?)?.1),
        Command::Doomlp {
            model,
            data,
            csv,
            delta,
            draws,
            seed,
            out,
        } => {
            let delta = if delta == "auto" {
                DoomDelta::Auto {
                    draws,
                    seed: seed.unwrap_or(0),
                }
            } else {
                DoomDelta::Fixed(delta.parse().map_err(|_| {
                    Error::InvalidArgument(format!("--delta expects a number or auto, got {delta}"))
                })?)
            };
            let (outcome, art) = cmd_doomlp(&model, &data, &csv.options(), delta, &out)?;
            println!(
                "delta {}: margin cost {} -> {}",
                outcome.delta, outcome.result.initial_cost, outcome.result.final_cost
            );
            list(&art);
        }
        Command::Rademacher {
            data,
            csv,
            gen,
            draws,
            seed,
        } => {
            let seed = seed.unwrap_or(0);
            let ds = match data {
                Some(p) => load_csv(&p, &csv.options())?,
                None => generate(&gen.spec(), seed)?,
            };
            let est = cmd_rademacher(&ds, draws, seed)?;
            println!("n,estimate,std_error");
            println!("{},{},{}", ds.len(), est.estimate, est.std_error);
        }
        Command::Plot {
            csv,
            x,
            y,
            title,
            out,
        } => {
            let report = BoundReport::load(&csv)?;
            let x = x.unwrap_or_else(|| report.columns[0].clone());
            let ys = if y.is_empty() {
                report
                    .columns
                    .iter()
                    .filter(|c| **c != x)
                    .cloned()
                    .collect()
            } else {
                y
            };
            let svg = report.chart(&title, &x, &ys)?.to_svg()?;
            std::fs::write(&out, svg)?;
            println!("{}", out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
