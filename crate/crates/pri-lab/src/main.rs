fn main() {
    std::process::exit(pri_lab::cli::run_from_args(std::env::args_os()));
}
