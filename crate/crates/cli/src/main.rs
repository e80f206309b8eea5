use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(divsmooth::cli::run_from_args() as u8)
}
