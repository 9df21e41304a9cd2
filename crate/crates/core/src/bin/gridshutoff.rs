fn main() {
    std::process::exit(gridshutoff::cli::run_cli(std::env::args_os()));
}
