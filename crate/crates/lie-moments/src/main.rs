use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(lie_moments::cli::run())
}
