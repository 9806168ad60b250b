fn main() {
    std::process::exit(hopf_lab_cli::run(std::env::args_os()));
}
