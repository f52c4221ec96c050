fn main() {
    std::process::exit(tbar_cli::run());
}
