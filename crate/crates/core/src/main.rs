fn main() {
    std::process::exit(genusforge::cli::run());
}
