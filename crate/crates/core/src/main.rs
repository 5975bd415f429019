fn main() {
    std::process::exit(glossaug::cli::run(std::env::args_os()));
}
