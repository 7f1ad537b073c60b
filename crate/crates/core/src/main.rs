fn main() {
    std::process::exit(symbidisc::cli::run(std::env::args_os()));
}
