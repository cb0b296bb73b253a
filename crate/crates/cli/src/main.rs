fn main() {
    std::process::exit(weylscope_cli::run(std::env::args_os()));
}
