fn main() {
    std::process::exit(gindex::cli::run(std::env::args_os()));
}
