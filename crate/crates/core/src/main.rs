fn main() {
    std::process::exit(entcost::cli::main_with_args(std::env::args_os()));
}
