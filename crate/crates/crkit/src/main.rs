use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(crkit::cli::run(std::env::args_os()) as u8)
}
