fn main() {
    std::process::exit(asi_core::cli::run(std::env::args_os()));
}
