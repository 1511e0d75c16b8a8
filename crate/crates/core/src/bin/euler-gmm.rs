fn main() {
    std::process::exit(euler_gmm::cli::main_with_args(std::env::args_os()));
}
