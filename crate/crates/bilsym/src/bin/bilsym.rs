fn main() -> std::process::ExitCode {
    bilsym::cli::main()
}
