fn main() {
    std::process::exit(osmoflow::run(std::env::args_os()));
}
