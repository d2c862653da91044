fn main() {
    std::process::exit(rule_ensemble::cli::run(std::env::args_os()));
}
