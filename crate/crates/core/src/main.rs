fn main() {
    std::process::exit(duetdyn::cli::run_command(std::env::args_os()));
}
