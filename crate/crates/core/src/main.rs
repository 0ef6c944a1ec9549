fn main() {
    std::process::exit(olg_health::cli::run_from(std::env::args_os()));
}
