fn main() {
    std::process::exit(groupcount::cli::run(std::env::args_os()));
}
