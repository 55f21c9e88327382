fn main() {
    std::process::exit(fitzcalc::cli::main_with_args(std::env::args_os()));
}
