fn main() -> std::process::ExitCode {
    rebal::cli::main()
}
