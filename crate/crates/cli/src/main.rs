use clap::Parser;

use cavity_ghz_cli::commands::{run, Cli};

fn main() {
    // usage errors share exit status 1 with configuration errors; 2 is
    // reserved for a failed validity check
    let cli = Cli::try_parse().unwrap_or_else(|e| {
        let code = if e.use_stderr() { 1 } else { 0 };
        let _ = e.print();
        std::process::exit(code);
    });
    let mut stdout = std::io::stdout().lock();
    if let Err(e) = run(&cli, &mut stdout) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
