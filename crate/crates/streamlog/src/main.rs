fn main() {
    std::process::exit(streamlog::run());
}
