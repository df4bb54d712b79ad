fn main() {
    std::process::exit(handoff::cli::main(std::env::args_os()));
}
