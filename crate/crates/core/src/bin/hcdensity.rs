fn main() {
    std::process::exit(hypercube_density::cli::main_with_args(std::env::args_os()));
}
