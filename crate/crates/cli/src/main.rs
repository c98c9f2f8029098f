use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use defii_cli::{execute, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(text) => {
            print!("{text}");
            let _ = std::io::stdout().flush();
            ExitCode::SUCCESS
        }
        Err(e) => {
            // Multi-line errors carry a report; the last line is the diagnostic.
            let text = e.to_string();
            match text.rsplit_once('\n') {
                Some((report, last)) => {
                    println!("{report}");
                    eprintln!("error: {last}");
                }
                None => eprintln!("error: {text}"),
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
