fn main() {
    std::process::exit(polgate::cli::main())
}
