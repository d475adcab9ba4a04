fn main() {
    std::process::exit(isogeom::cli::run(std::env::args_os()));
}
