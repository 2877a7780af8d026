fn main() {
    chaoscorr_cli::ensure_reliable_blas();
    std::process::exit(chaoscorr_cli::cli::main_with_args(std::env::args_os()));
}
