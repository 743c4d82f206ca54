fn main() {
    std::process::exit(gaudin::cli::main_with(std::env::args_os()));
}
