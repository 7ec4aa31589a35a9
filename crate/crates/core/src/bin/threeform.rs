fn main() {
    std::process::exit(threeform::cli::run(std::env::args_os()));
}
