fn main() {
    std::process::exit(entropy_forge::cli::run(std::env::args_os()));
}
