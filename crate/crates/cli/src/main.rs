use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use adw_cli::{execute, CliError, Mode, RunConfig};

/// Algebrodynamics workbench batch runner.
#[derive(Debug, Parser)]
#[command(name = "adw", version)]
struct Args {
    mode: Mode,
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Override a config key, e.g. `--set grid.n=[8,8,8]`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn run(args: &Args) -> Result<(), CliError> {
    let cfg = RunConfig::load(&args.config, &args.set)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| CliError::Config(format!("workers: {e}")))?;
    let manifest = pool.install(|| execute(args.mode, &cfg))?;
    for o in &manifest.outputs {
        println!("{}/{} ({} rows)", cfg.output_dir, o.file, o.rows);
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("adw: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
