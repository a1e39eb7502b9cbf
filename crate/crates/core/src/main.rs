fn main() -> std::process::ExitCode {
    hintcolor::cli::run(std::env::args_os())
}
