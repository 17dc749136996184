use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use resfluor::cli::{parse_methods, run, RunOptions, EXIT_CONFIG, OUT_DIR_ENV};

#[derive(Parser)]
#[command(
    name = "resfluor",
    version,
    about = "Incoherent resonance-fluorescence spectra"
)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the spectra described by a JSON config.
    Run {
        config: PathBuf,
        /// Comma-separated subset of limit,variance,oracle,mollow.
        #[arg(long)]
        methods: Option<String>,
        /// Output directory; overrides the config and the environment.
        #[arg(long, help = format!("Output directory (overrides ${OUT_DIR_ENV} and the config)"))]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let Args { command } = Args::parse();
    let code = match command {
        Command::Run {
            config,
            methods,
            out,
        } => {
            let methods = match methods.as_deref().map(parse_methods).transpose() {
                Ok(m) => m,
                Err(err) => {
                    eprintln!("error: {err}");
                    return ExitCode::from(EXIT_CONFIG as u8);
                }
            };
            run(&config, &RunOptions { methods, out })
        }
    };
    ExitCode::from(code as u8)
}
