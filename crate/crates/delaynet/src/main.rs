use std::process::ExitCode;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("DELAYNET_LOG")).init();
    ExitCode::from(delaynet::harness::cli::run(std::env::args_os()) as u8)
}
