fn main() {
    std::process::exit(tran_cli::run(std::env::args_os().skip(1)));
}
