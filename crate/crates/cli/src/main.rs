//! Command-line front end for the series engine.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 domain error or
//! non-reversible anchor, 3 oracle did not converge. Failures still print a
//! structured record on stdout.

mod args;
mod output;
mod run;

use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::Cli;
use output::ErrorRecord;
use run::Failure;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let format = cli.command.common().format;
    let (text, code) = match run::run(&cli.command) {
        Ok(record) => (record.render(format), 0),
        Err(failure) => {
            let code = failure.exit_code();
            let record = match &failure {
                Failure::Usage(message) => ErrorRecord::new(cli.command.name(), "UsageError", message.clone()),
                Failure::Engine(e) => ErrorRecord::from_error(cli.command.name(), e),
            };
            (record.render(format), code)
        }
    };
    let mut stdout = std::io::stdout().lock();
    // a closed pipe is not worth a panic
    let _ = stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush());
    ExitCode::from(code)
}
