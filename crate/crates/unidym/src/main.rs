//! Command-line entry point.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use unidym::config::Config;
use unidym::emit::{write_output, Format};
use unidym::error::{HarnessError, Result};
use unidym::experiments;
use unidym::plot::{render, PlotKind};

#[derive(Parser)]
#[command(
    name = "unidym",
    version,
    about = "Reproducible experiments for one-dimensional real dynamics",
    after_help = "Run `unidym list` to see the experiment registry."
)]
struct Cli {
    /// Experiment identifier, or `list` to print the registry.
    experiment: String,
    /// Flat key-value configuration file (`key = value` lines, `#` comments).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for records and plots.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Record format.
    #[arg(long, value_enum, default_value_t = CliFormat::Csv)]
    format: CliFormat,
    /// Seed of the deterministic random streams.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Optional plot rendered from the records.
    #[arg(long, value_enum)]
    plot: Option<CliPlot>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CliFormat {
    Csv,
    Jsonl,
}

#[derive(Clone, Copy, ValueEnum)]
enum CliPlot {
    MarginHistogram,
    CensusVsParameter,
    RhoEnvelope,
}

impl From<CliFormat> for Format {
    fn from(f: CliFormat) -> Format {
        match f {
            CliFormat::Csv => Format::Csv,
            CliFormat::Jsonl => Format::Jsonl,
        }
    }
}

impl From<CliPlot> for PlotKind {
    fn from(p: CliPlot) -> PlotKind {
        match p {
            CliPlot::MarginHistogram => PlotKind::MarginHistogram,
            CliPlot::CensusVsParameter => PlotKind::CensusVsParameter,
            CliPlot::RhoEnvelope => PlotKind::RhoEnvelope,
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    if cli.experiment == "list" {
        for e in experiments::registry() {
            println!("{:<24} {}", e.id, e.about);
        }
        return Ok(());
    }
    let exp = experiments::find(&cli.experiment).ok_or_else(|| {
        HarnessError::Usage(format!(
            "unknown experiment `{}`; run `unidym list`",
            cli.experiment
        ))
    })?;
    let config = match &cli.config {
        Some(path) => Config::from_file(path)?,
        None => Config::empty(),
    };
    let records = (exp.run)(&config, cli.seed)?;
    let path = write_output(&cli.out, exp.id, Format::from(cli.format), &records, cli.seed)?;
    let flagged = records
        .iter()
        .filter(|r| r.status == unidym::record::Status::Flag)
        .count();
    let failed = records
        .iter()
        .filter(|r| r.status == unidym::record::Status::Fail)
        .count();
    println!(
        "{}: {} records ({} failed, {} flagged) -> {}",
        exp.id,
        records.len(),
        failed,
        flagged,
        path.display()
    );
    if let Some(plot) = cli.plot {
        let kind = PlotKind::from(plot);
        let svg = render(kind, &records)?;
        let plot_path = cli.out.join(format!("{}-{}.svg", exp.id, kind.as_str()));
        fs::write(&plot_path, svg).map_err(|e| {
            HarnessError::Io(format!("cannot write {}: {e}", plot_path.display()))
        })?;
        println!("{}: plot -> {}", exp.id, plot_path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("unidym: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
