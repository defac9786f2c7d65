fn main() {
    std::process::exit(algebroid_kit::cli::run(std::env::args_os()));
}
