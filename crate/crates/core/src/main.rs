fn main() {
    let status = nilsep::cli::run(std::env::args(), &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(status);
}
