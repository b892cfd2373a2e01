fn main() {
    std::process::exit(enriques_cli::dispatch(std::env::args_os()));
}
