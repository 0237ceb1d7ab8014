fn main() {
    std::process::exit(topiceval::cli::run());
}
