fn main() {
    std::process::exit(setreach_cli::main_with(std::env::args_os()));
}
