fn main() {
    std::process::exit(evanescent::cli::run(std::env::args_os()));
}
