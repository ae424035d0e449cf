fn main() {
    std::process::exit(renyi_epi::cli::run(std::env::args_os()));
}
