fn main() {
    std::process::exit(finobs_cli::run(std::env::args_os()));
}
