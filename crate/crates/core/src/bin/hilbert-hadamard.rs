fn main() {
    std::process::exit(hilbert_hadamard::cli::run(std::env::args_os()));
}
