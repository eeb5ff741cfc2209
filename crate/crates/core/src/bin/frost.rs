fn main() {
    std::process::exit(frost::cli::run(std::env::args_os()));
}
