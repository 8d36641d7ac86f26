fn main() {
    std::process::exit(sv2rdm::cli::run(std::env::args_os()));
}
