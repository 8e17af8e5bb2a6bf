fn main() -> std::process::ExitCode {
    lbm_core::cli::main()
}
