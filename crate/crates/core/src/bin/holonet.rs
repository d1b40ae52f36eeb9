fn main() {
    std::process::exit(holonet::cli::main_with_args(std::env::args_os()));
}
