fn main() {
    std::process::exit(dirac_orbits::cli::run(std::env::args_os()));
}
