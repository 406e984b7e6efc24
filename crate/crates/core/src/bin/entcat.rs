fn main() {
    std::process::exit(entcat::cli::main_with_args(std::env::args_os()));
}
