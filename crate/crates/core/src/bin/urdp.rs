fn main() {
    std::process::exit(urdp::cli::run(std::env::args_os()));
}
