fn main() {
    std::process::exit(colsel::cli::run(std::env::args_os()));
}
