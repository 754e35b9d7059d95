fn main() {
    std::process::exit(feistab::cli::run(std::env::args_os()));
}
