fn main() {
    std::process::exit(abelrd::cli::main());
}
