fn main() {
    std::process::exit(xychain::cli::run(std::env::args_os()));
}
