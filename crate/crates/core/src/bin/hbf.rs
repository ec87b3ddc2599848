fn main() {
    std::process::exit(hbf::cli::run());
}
