fn main() {
    std::process::exit(ltlab_cli::run_command(std::env::args_os()));
}
