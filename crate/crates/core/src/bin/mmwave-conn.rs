fn main() {
    std::process::exit(mmwave_connectivity::cli::run(std::env::args_os()));
}
