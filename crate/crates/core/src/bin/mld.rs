fn main() {
    std::process::exit(mld::cli::main_with_args(std::env::args_os()));
}
