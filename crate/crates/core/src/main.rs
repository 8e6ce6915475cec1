fn main() {
    std::process::exit(kronrisk::cli::run(std::env::args_os()));
}
