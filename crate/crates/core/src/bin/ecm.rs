fn main() {
    std::process::exit(ecm::cli::main_with_args(std::env::args_os()));
}
