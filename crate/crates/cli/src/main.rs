use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use macroq_cli::inspect::{inspect, parse_state_arg, write_wigner_csv};
use macroq_cli::presets::preset_manifest;
use macroq_cli::report::write_rows;
use macroq_cli::{run, CliError, OutputFormat, RunManifest, RunOptions};

#[derive(Parser)]
#[command(name = "macroq", version, about = "Evaluate macroscopic-quantumness measures in batch")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunFlags {
    /// Worker threads for sweep points.
    #[arg(long)]
    jobs: Option<usize>,
    /// Overrides the manifest seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Report path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a TOML manifest.
    Run {
        manifest: PathBuf,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Run a built-in manifest (`preset list` prints the tags).
    Preset {
        tag: String,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Inspect a single state.
    State {
        #[command(subcommand)]
        command: StateCommand,
    },
}

#[derive(Subcommand)]
enum StateCommand {
    /// Mean photon number, purity and Wigner extrema of a state spec given as
    /// a TOML file or inline TOML.
    Inspect {
        spec: String,
        /// Also write the Wigner grid of `--mode` as x,p,value.
        #[arg(long)]
        wigner_csv: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        mode: usize,
    },
}

fn execute(manifest: RunManifest, flags: RunFlags) -> Result<ExitCode, CliError> {
    let opts = RunOptions { jobs: flags.jobs, seed: flags.seed };
    let rows = run(&manifest, &opts)?;
    let format = flags.format.unwrap_or(manifest.output.format);
    let path = flags.out.or_else(|| manifest.output.path.as_ref().map(PathBuf::from));
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(&p)?);
            write_rows(&rows, format, &mut w)?;
            w.flush()?;
        }
        None => write_rows(&rows, format, io::stdout().lock())?,
    }
    let failed = rows.iter().filter(|r| r.is_error()).count();
    if failed > 0 {
        eprintln!("{failed} of {} rows failed", rows.len());
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { manifest, flags } => RunManifest::from_path(&manifest).and_then(|m| execute(m, flags)),
        Command::Preset { tag, .. } if tag == "list" => {
            for (t, _) in macroq_cli::presets::PRESETS {
                println!("{t}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Preset { tag, flags } => preset_manifest(&tag).and_then(|m| execute(m, flags)),
        Command::State { command: StateCommand::Inspect { spec, wigner_csv, mode } } => {
            parse_state_arg(&spec).and_then(|s| {
                print!("{}", inspect(&s)?);
                if let Some(p) = wigner_csv {
                    write_wigner_csv(&s, mode, BufWriter::new(File::create(p)?))?;
                }
                Ok(ExitCode::SUCCESS)
            })
        }
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(1)
    })
}
