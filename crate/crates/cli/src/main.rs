//! `prbp` command-line tool.
//!
//! Exit codes: 0 success, 1 failed check, 2 solver budget exhausted,
//! 3 infeasible, 4 usage or input error.

mod args;
mod commands;
mod manifest;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::Cli;
use commands::{Ctx, EXIT_OK, EXIT_USAGE};
use manifest::RunManifest;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::from(EXIT_OK as u8),
                _ => ExitCode::from(EXIT_USAGE as u8),
            };
        }
    };
    let params = serde_json::to_value(&cli).unwrap_or_default();
    let name = params["command"]
        .as_object()
        .and_then(|o| o.keys().next().cloned())
        .unwrap_or_default();
    let mut ctx = Ctx {
        global: &cli.global,
        manifest: RunManifest::new(&name, params),
    };
    let code = match commands::run(&mut ctx, &cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ctx.manifest.exit_code = code;
    write_manifest(&cli, &ctx.manifest);
    ExitCode::from(code as u8)
}

fn write_manifest(cli: &Cli, manifest: &RunManifest) {
    let Ok(text) = serde_json::to_string(manifest) else {
        return;
    };
    let path = cli
        .global
        .manifest
        .clone()
        .or_else(|| cli.global.out.as_deref().map(RunManifest::path_for));
    match path {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, text + "\n") {
                eprintln!("warning: could not write manifest {}: {e}", path.display());
            }
        }
        None => eprintln!("{text}"),
    }
}
