fn main() {
    std::process::exit(apm_lab::cli::main_from_env());
}
