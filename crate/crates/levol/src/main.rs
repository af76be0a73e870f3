fn main() -> std::process::ExitCode {
    levol::cli::run(std::env::args_os())
}
