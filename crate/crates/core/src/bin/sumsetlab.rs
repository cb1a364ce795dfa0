fn main() {
    std::process::exit(sumsetlab::cli::run_command(std::env::args_os()));
}
