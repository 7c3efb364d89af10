fn main() {
    std::process::exit(morrey_lab::harness::run_cli(std::env::args_os()));
}
