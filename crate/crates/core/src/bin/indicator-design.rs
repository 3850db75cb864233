fn main() {
    std::process::exit(indicator_design::cli::main_with_args(std::env::args_os()));
}
