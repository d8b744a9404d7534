fn main() {
    let outcome = stepwise::cli::run(std::env::args_os());
    if outcome.code == 2 || outcome.report.is_none() {
        eprintln!("{}", outcome.message);
    } else {
        println!("{}", outcome.message);
    }
    std::process::exit(outcome.code);
}
