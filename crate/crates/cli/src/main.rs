fn main() {
    std::process::exit(ctbkit_cli::run(std::env::args_os()));
}
