fn main() {
    std::process::exit(genmetrics::cli::run(std::env::args_os()));
}
