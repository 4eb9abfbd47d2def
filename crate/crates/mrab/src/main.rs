fn main() {
    std::process::exit(mrab::cli::run());
}
