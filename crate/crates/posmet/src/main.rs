fn main() {
    let code = posmet::cli::run(std::env::args_os(), std::env::vars());
    std::process::exit(code);
}
