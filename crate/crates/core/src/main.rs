fn main() {
    std::process::exit(thinshield::cli::run(std::env::args_os()));
}
