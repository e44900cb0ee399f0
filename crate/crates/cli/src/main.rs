fn main() {
    std::process::exit(rgg_rainbow_cli::main_with_args(std::env::args_os()));
}
