fn main() {
    std::process::exit(treelet::cli::main());
}
