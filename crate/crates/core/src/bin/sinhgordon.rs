fn main() {
    std::process::exit(sinhgordon::cli::run(std::env::args_os()));
}
