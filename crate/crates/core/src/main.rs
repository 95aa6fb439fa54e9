use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(skewmon::cli::run(std::env::args_os()))
}
