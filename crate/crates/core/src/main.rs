fn main() {
    std::process::exit(cmcb::cli::run_command(std::env::args_os()));
}
