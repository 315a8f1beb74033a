fn main() {
    std::process::exit(upblab::cli::run(std::env::args_os()));
}
