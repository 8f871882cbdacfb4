fn main() {
    std::process::exit(lrecover::cli::run(std::env::args_os()));
}
