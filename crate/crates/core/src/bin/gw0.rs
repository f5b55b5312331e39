fn main() {
    std::process::exit(gw0::cli::main_with(std::env::args_os()));
}
