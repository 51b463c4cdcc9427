fn main() { std::process::exit(bounded_derham::cli::main_with_args(std::env::args_os())) }
