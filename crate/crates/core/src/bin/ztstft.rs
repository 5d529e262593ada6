use clap::Parser;

fn main() {
    let cli = match ztstft::cli::Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { ztstft::cli::EXIT_INPUT } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    std::process::exit(ztstft::cli::run(cli));
}
