fn main() {
    std::process::exit(tactoid::cli::main_with_args(std::env::args_os()));
}
