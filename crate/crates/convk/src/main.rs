fn main() {
    std::process::exit(convk::cli::run(std::env::args_os()));
}
