use clap::Parser;

fn main() {
    let cli = dho_cli::Cli::parse();
    match dho_cli::run(&cli) {
        Ok(summary) => println!("{summary}"),
        Err(err) => {
            eprintln!("error[{}]: {err}", err.category());
            std::process::exit(err.exit_code());
        }
    }
}
