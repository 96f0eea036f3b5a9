fn main() {
    std::process::exit(ctc_sim::cli::run(std::env::args_os()));
}
