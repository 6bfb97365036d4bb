fn main() {
    std::process::exit(pinlab::cli::run(std::env::args_os()));
}
