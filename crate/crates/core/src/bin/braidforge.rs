fn main() {
    std::process::exit(braidforge::cli::main());
}
