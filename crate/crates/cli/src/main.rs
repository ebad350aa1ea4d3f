use clap::error::ErrorKind;
use clap::Parser;
use symext_cli::cli::{run, Cli};
use symext_cli::exit_code;

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => exit_code::OK,
                ErrorKind::InvalidSubcommand | ErrorKind::UnknownArgument => exit_code::USAGE,
                _ => exit_code::VALIDATION,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(err.code);
        }
    }
}
