fn main() {
    std::process::exit(radial_coulomb::cli::parse_and_dispatch(std::env::args_os()));
}
