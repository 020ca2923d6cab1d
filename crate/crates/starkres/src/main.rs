fn main() {
    std::process::exit(starkres::cli::run());
}
