fn main() {
    std::process::exit(dynde::harness::run_cli(std::env::args_os()));
}
