use std::io;
use std::process;

use clap::Parser;
use shardstock_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    let code = run(cli, &mut io::stdout().lock(), &mut io::stderr().lock());
    process::exit(code);
}
