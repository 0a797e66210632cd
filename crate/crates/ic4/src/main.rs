fn main() {
    std::process::exit(ic4::cli::run(std::env::args_os()));
}
