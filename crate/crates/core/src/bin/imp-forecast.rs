fn main() {
    std::process::exit(impforecast::cli::run_cli(std::env::args_os()));
}
