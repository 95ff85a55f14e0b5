use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = hminus::Cli::parse();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    match hminus::run(cli, &mut stdout.lock(), &mut stderr.lock()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("hminus: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
