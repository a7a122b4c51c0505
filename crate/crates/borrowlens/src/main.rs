fn main() -> std::process::ExitCode {
    borrowlens::cli::main()
}
