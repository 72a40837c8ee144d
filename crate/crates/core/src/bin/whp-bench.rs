fn main() {
    std::process::exit(whp_parallel::bench::cli::run(std::env::args_os()));
}
