fn main() {
    std::process::exit(secmux::cli::run(std::env::args_os()));
}
