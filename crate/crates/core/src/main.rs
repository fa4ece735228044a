fn main() {
    std::process::exit(extremal::cli::main_with(std::env::args()));
}
