fn main() {
    std::process::exit(gausslab::cli::main_with_args(std::env::args_os()));
}
