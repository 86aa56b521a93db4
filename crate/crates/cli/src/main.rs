use std::process::ExitCode;

fn main() -> ExitCode {
    misocache_cli::run(std::env::args_os())
}
