fn main() {
    std::process::exit(robust_assignment::cli::run(std::env::args_os()));
}
