fn main() {
    std::process::exit(gmsk_wsn_cli::run_from_args(std::env::args_os()));
}
