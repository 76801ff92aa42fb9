fn main() {
    std::process::exit(foliate::cli::main_with_args(std::env::args_os()));
}
