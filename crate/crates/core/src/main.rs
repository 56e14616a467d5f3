use std::process::ExitCode;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("SCE_LOG")).init();
    ExitCode::from(sce::cli::main_with(std::env::args_os()))
}
