fn main() {
    std::process::exit(fewbody::cli::main());
}
