fn main() {
    std::process::exit(evifore::cli::run());
}
