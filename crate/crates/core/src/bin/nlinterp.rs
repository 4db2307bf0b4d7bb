fn main() {
    std::process::exit(nonlin_interp::cli::main_with_args(std::env::args_os()));
}
