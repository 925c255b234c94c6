fn main() {
    std::process::exit(sphere_sapt_cli::run(std::env::args_os().collect()));
}
