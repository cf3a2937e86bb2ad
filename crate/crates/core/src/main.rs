fn main() {
    std::process::exit(qudit_tomography::cli::main());
}
