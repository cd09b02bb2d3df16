fn main() {
    std::process::exit(frac_kantorovich::cli::main_with_args(std::env::args_os()));
}
