fn main() {
    std::process::exit(espr::cli::run(std::env::args_os()));
}
