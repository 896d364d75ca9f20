use clap::Parser;

fn main() {
    let cli = quasiprob::cli::Cli::parse();
    match quasiprob::cli::run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(2);
        }
    }
}
