fn main() {
    std::process::exit(loopsim::cli::run(std::env::args_os()));
}
