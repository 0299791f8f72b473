fn main() {
    std::process::exit(opdop::cli::run());
}
