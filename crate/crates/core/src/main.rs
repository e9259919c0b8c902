fn main() {
    std::process::exit(tfe_core::cli::run_command(std::env::args_os()));
}
