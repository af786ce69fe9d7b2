fn main() {
    std::process::exit(microtensile::cli::run(std::env::args_os()));
}
