fn main() {
    std::process::exit(hvmodel::cli::run(std::env::args_os()));
}
