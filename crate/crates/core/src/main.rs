fn main() {
    std::process::exit(paretoprobe::cli::run(std::env::args_os()));
}
