fn main() {
    std::process::exit(afar_twin::cli::main_with_args(std::env::args_os()));
}
