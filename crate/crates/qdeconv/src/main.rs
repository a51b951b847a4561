fn main() -> std::process::ExitCode {
    qdeconv::cli::main()
}
