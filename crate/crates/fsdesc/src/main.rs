fn main() {
    std::process::exit(fsdesc::cli::run());
}
