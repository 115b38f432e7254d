fn main() {
    std::process::exit(rankforge::cli::run(std::env::args_os()));
}
