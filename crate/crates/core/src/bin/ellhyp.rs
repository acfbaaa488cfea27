fn main() {
    std::process::exit(ellhyp::cli::run());
}
