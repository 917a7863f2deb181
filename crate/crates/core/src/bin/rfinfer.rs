fn main() -> std::process::ExitCode {
    rfinfer::cli::run()
}
