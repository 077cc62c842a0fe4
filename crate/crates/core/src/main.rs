use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;
use filleting::cli::{run, Cli};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // clap uses 2 for usage errors; here 2 means a step failure.
            let help = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            std::process::exit(if help { 0 } else { 1 });
        }
    };
    let out = run(cli);
    if out.code == 1 {
        eprint!("{}", out.text);
    } else {
        let _ = std::io::stdout().write_all(out.text.as_bytes());
    }
    std::process::exit(out.code);
}
