use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(priority_asep::cli::run(std::env::args_os()))
}
