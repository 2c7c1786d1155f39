fn main() {
    std::process::exit(revalu::cli::main());
}
