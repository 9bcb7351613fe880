fn main() {
    std::process::exit(memsreg::cli::main_with_args(std::env::args_os()));
}
