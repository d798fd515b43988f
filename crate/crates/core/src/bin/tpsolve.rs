fn main() {
    std::process::exit(tpsolve::cli::run(std::env::args_os()));
}
