fn main() {
    std::process::exit(bispectral::cli::main_with(std::env::args_os()));
}
