fn main() {
    std::process::exit(bnet::cli::main_with_args(std::env::args_os()));
}
