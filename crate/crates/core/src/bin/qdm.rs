fn main() {
    std::process::exit(qdm::cli::main_with_args(std::env::args_os()));
}
