use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(cpb::run(std::env::args_os()) as u8)
}
