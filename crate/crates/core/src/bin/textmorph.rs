fn main() {
    std::process::exit(textmorph::cli::run(std::env::args_os()));
}
