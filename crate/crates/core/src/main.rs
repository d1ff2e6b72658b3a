fn main() {
    std::process::exit(ftr_secrecy::experiment::cli::main_with(std::env::args_os()));
}
