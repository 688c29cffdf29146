fn main() {
    std::process::exit(warpcurv::cli::main_from_env());
}
