//! `chiral-wgm`: runs mode solves, spectra, sweeps and device reports from a JSON config and
//! writes CSV or JSON artifacts, each with a `<stem>.manifest.json`.

mod commands;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use chiral_wgm::export::{self, Manifest, OutputFormat};
use commands::{CliError, CliResult};
use config::{Command, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "chiral-wgm", version, about = "Chiral atom-resonator models driven by JSON configs")]
struct Args {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Directory for artifacts; relative output paths resolve against it.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Overrides the format given in the config.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Reserved; every algorithm is deterministic.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

fn load_config(path: &Path) -> CliResult<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn io_err(e: impl std::fmt::Display) -> CliError {
    CliError::Solver(format!("writing output: {e}"))
}

fn execute(args: &Args) -> CliResult<bool> {
    let cfg = load_config(&args.config)?;
    if let Some(n) = args.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Config(e.to_string()))?;
    }
    let format = match args.format {
        Some(FormatArg::Csv) => OutputFormat::Csv,
        Some(FormatArg::Json) => OutputFormat::Json,
        None => cfg.output.format.unwrap_or_default(),
    };
    let artifact = commands::run(cfg.command, &cfg.params)?;
    let name = cfg.output.path.clone().unwrap_or_else(|| format!("{}.{}", cfg.command.name(), format.extension()));
    let path = args.out.join(name);
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(io_err)?;
    }
    match format {
        OutputFormat::Csv => artifact.table.write_csv(&path).map_err(io_err)?,
        OutputFormat::Json => export::write_json(&path, &artifact.json).map_err(io_err)?,
    }
    let mut manifest = Manifest::new(cfg.command.name(), artifact.resolved.clone());
    manifest.outputs.push(path.display().to_string());
    let mut value = serde_json::to_value(&manifest).expect("serializable");
    value["format"] = json!(format);
    value["summary"] = artifact.summary.clone();
    value["cli"] = json!({ "threads": args.threads, "seed": args.seed });
    export::write_json(&export::manifest_path(&path), &value).map_err(io_err)?;
    if cfg.command == Command::Validate {
        println!("{:<52} {:>18} {:>18}  status", "check", "value", "limit");
        for row in &artifact.table.rows {
            println!("{:<52} {:>18} {:>18}  {}", row[0], row[1], row[2], row[3]);
        }
    } else {
        println!("{}", serde_json::to_string(&artifact.summary).expect("serializable"));
    }
    log::info!("wrote {}", path.display());
    Ok(!artifact.failed)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    match execute(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("validation failed");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
