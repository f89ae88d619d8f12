use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use noisy_teleport::sweep::{emit, execute, parse_args, Invocation, ResultRow};

const EXIT_RUNTIME: u8 = 3;

fn write_rows(invocation: &Invocation, rows: &[ResultRow]) -> io::Result<()> {
    match &invocation.out {
        Some(path) => emit(rows, invocation.format, &mut BufWriter::new(File::create(path)?)),
        None => emit(rows, invocation.format, &mut io::stdout().lock()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();

    let invocation = match parse_args(std::env::args_os()) {
        Ok(invocation) => invocation,
        Err(err) => err.exit(),
    };

    let (rows, failure) = match execute(&invocation) {
        Ok(rows) => (rows, None),
        Err(aborted) => (aborted.completed, Some(aborted.source)),
    };
    if let Err(err) = write_rows(&invocation, &rows) {
        eprintln!("error: cannot write results: {err}");
        return ExitCode::from(EXIT_RUNTIME);
    }
    if let Some(err) = failure {
        let _ = io::stdout().flush();
        eprintln!("error: {err}");
        return ExitCode::from(EXIT_RUNTIME);
    }
    ExitCode::SUCCESS
}
