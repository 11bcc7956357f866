fn main() {
    std::process::exit(hypdeloc::cli::run(std::env::args_os()));
}
