fn main() -> std::process::ExitCode {
    clickstat::cli::run()
}
