fn main() {
    std::process::exit(leverage_cli::run(std::env::args_os()));
}
