fn main() {
    std::process::exit(spectra::cli::main_with_args(std::env::args_os()));
}
