fn main() {
    std::process::exit(inclusion_lab::cli::main_with_args(std::env::args_os().skip(1)));
}
