mod args;
mod commands;
mod config;
mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{CommandFactory, FromArgMatches};
use fkdv::{Error, Result};

use args::{Cli, Command, Format};
use report::{error_json, write_file, Manifest, Outcome};

fn main() {
    std::process::exit(run(std::env::args_os().collect()));
}

/// Parse `argv`, folding in a `--config` file when one is named.
fn parse(argv: Vec<OsString>) -> std::result::Result<Cli, i32> {
    let clap_exit = |e: clap::Error| {
        let _ = e.print();
        match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
            _ => 1,
        }
    };
    let root = Cli::command();
    let matches = root
        .clone()
        .try_get_matches_from(&argv)
        .map_err(clap_exit)?;
    let mut argv = argv;
    if let Some((name, sub)) = matches.subcommand() {
        if let Some(path) = sub.get_one::<PathBuf>("config") {
            let extra = config::load(path, name).and_then(|keys| {
                let cmd = root
                    .find_subcommand(name)
                    .expect("parsed subcommand exists");
                config::extra_args(cmd, sub, &keys)
            });
            match extra {
                Ok(extra) => argv.extend(extra),
                Err(e) => {
                    eprintln!("error: {e}");
                    return Err(e.exit_code());
                }
            }
        }
    }
    let matches = root.try_get_matches_from(&argv).map_err(clap_exit)?;
    Cli::from_arg_matches(&matches).map_err(clap_exit)
}

fn init_threads() -> Result<()> {
    let Ok(v) = std::env::var("FKDV_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        Error::Invalid(format!(
            "FKDV_THREADS must be a positive integer, got `{v}`"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Invalid(format!("thread pool: {e}")))
}

fn run(argv: Vec<OsString>) -> i32 {
    let cli = match parse(argv) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let (label, inputs, output) = commands::describe(&cli.command);
    let outcome = init_threads().and_then(|_| commands::run(&cli.command));
    let mut manifest = Manifest {
        command: label,
        inputs,
        results: serde_json::Value::Null,
        artifacts: Vec::new(),
        error: None,
    };
    let code = match outcome {
        Ok(outcome) => match emit(&mut manifest, &outcome, &output) {
            Ok(()) => return 0,
            Err(e) => e,
        },
        Err(e) => e,
    };
    eprintln!("error: {code}");
    manifest.error = Some(error_json(&code));
    if output.format == Format::Json {
        println!("{:#}", manifest.to_json());
    }
    if let Some(dir) = &output.out {
        let _ = write_file(
            dir,
            "manifest.json",
            format!("{:#}\n", manifest.to_json()).as_bytes(),
        );
    }
    if matches!(cli.command, Command::Reduce(_)) && code.exit_code() == 1 {
        eprintln!("usage: fkdv reduce --case <0-4> [--subalgebra <LABEL>] [OPTIONS]; see `fkdv reduce --help`");
    }
    code.exit_code()
}

fn emit(manifest: &mut Manifest, outcome: &Outcome, output: &args::Output) -> Result<()> {
    manifest.results = outcome.results.clone();
    if let Some(dir) = &output.out {
        for t in &outcome.tables {
            manifest.artifacts.push(write_file(dir, t.name, &t.csv)?);
        }
        write_file(
            dir,
            "manifest.json",
            format!("{:#}\n", manifest.to_json()).as_bytes(),
        )?;
    }
    let mut stdout = std::io::stdout().lock();
    let io = |e: std::io::Error| Error::Invalid(format!("stdout: {e}"));
    match output.format {
        Format::Json => writeln!(stdout, "{:#}", manifest.to_json()).map_err(io),
        Format::Csv => match outcome.tables.first() {
            Some(t) => stdout.write_all(&t.csv).map_err(io),
            None => Err(Error::Invalid(
                "this command has no CSV output; use --format json".into(),
            )),
        },
    }
}
