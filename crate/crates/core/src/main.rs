use clap::Parser;
use polyflow::cli::{execute, fuel_default, Cli};

fn main() {
    let cli = Cli::parse();
    let reply = execute(&cli.command, fuel_default());
    println!("{}", reply.stdout);
    if let Some(diag) = reply.stderr {
        eprintln!("{diag}");
    }
    std::process::exit(reply.code);
}
