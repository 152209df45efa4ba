fn main() {
    let args: Vec<String> = std::env::args().collect();
    std::process::exit(entropic_barrier_cli::parse_and_run(&args));
}
