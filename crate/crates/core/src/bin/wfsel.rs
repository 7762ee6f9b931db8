fn main() {
    std::process::exit(wfsel::cli::run(std::env::args_os()));
}
