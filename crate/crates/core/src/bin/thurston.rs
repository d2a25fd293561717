fn main() {
    std::process::exit(thurston::cli::main_with_args(std::env::args_os()));
}
