fn main() {
    std::process::exit(bsp::cli::run_from_env())
}
