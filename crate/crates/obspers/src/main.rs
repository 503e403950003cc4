fn main() {
    std::process::exit(obspers::cli::run(std::env::args_os()));
}
