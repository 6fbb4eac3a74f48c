fn main() {
    std::process::exit(antimod_cli::run_cli(std::env::args_os()));
}
