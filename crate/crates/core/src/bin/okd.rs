use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    okd_core::cli::run(std::env::args_os(), &mut io::stdout().lock(), &mut io::stderr().lock())
}
