use std::io::Write;

use clap::Parser;
use conjdim::cli::{execute, Cli};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let (text, code) = execute(&cli);
    let mut out = if code == 2 { Box::new(std::io::stderr()) as Box<dyn Write> } else { Box::new(std::io::stdout()) };
    let _ = out.write_all(text.as_bytes());
    std::process::exit(code);
}
