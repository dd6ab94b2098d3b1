use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(phasespace_cli::run(std::env::args_os()) as u8)
}
