//! `shiftdisc`: command-line runner for the shift-graph and discrepancy
//! experiments. Every run prints one JSON document `{command, config,
//! result, version}` (or a CSV table) and exits with 0, 2 (validation),
//! 3 (budget) or 4 (internal consistency).

mod args;
mod commands;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;
use serde::Serialize;

use args::{Cli, Format};
use commands::{Outcome, Table};
use shiftdisc::Error;

#[derive(Serialize)]
struct Document<'a> {
    command: &'a str,
    config: serde_json::Value,
    result: serde_json::Value,
    version: &'a str,
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    code: &'a str,
    message: String,
}

fn fail(err: &Error) -> ExitCode {
    let body =
        serde_json::json!({ "error": ErrorBody { code: err.code(), message: err.to_string() } });
    eprintln!("{body}");
    ExitCode::from(err.exit_code() as u8)
}

fn io_error(e: impl std::fmt::Display) -> Error {
    Error::InvalidArgument(format!("output: {e}"))
}

fn write_csv(out: &mut dyn Write, table: &Table) -> shiftdisc::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&table.headers).map_err(io_error)?;
    for row in &table.rows {
        w.write_record(row).map_err(io_error)?;
    }
    w.flush().map_err(io_error)
}

fn run(cli: &Cli, out: &mut dyn Write) -> shiftdisc::Result<()> {
    let (name, config) = cli.command.describe();
    let outcome: Outcome = commands::execute(&cli.command, out)?;
    match cli.format {
        Format::Json => {
            let doc = Document {
                command: name,
                config,
                result: outcome.result,
                version: shiftdisc::VERSION,
            };
            // NDJSON streams end with a single-line document
            let compact = matches!(&cli.command, args::Command::WorstSet(w) if w.ndjson);
            let text = if compact {
                serde_json::to_string(&doc)
            } else {
                serde_json::to_string_pretty(&doc)
            }
            .map_err(io_error)?;
            writeln!(out, "{text}").map_err(io_error)
        }
        Format::Csv => {
            let table = outcome.table.ok_or_else(|| {
                Error::InvalidArgument(format!("{name} has no tabular output; use --format json"))
            })?;
            write_csv(out, &table)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build_global()
    {
        return fail(&Error::InvalidArgument(format!("thread pool: {e}")));
    }
    let mut out: Box<dyn Write> = match &cli.output {
        Some(path) => match File::create(path) {
            Ok(f) => Box::new(BufWriter::new(f)),
            Err(e) => return fail(&io_error(e)),
        },
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let status = match run(&cli, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    };
    if let Err(e) = out.flush() {
        return fail(&io_error(e));
    }
    status
}
