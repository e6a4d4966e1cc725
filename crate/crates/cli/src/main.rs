fn main() {
    let outcome = scatter_sense_cli::run(std::env::args_os());
    std::process::exit(outcome.exit_code);
}
