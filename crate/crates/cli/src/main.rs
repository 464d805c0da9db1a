use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match trapfid_cli::run_from_args(std::env::args_os(), &mut lock) {
        Ok(()) => {
            let _ = lock.flush();
            ExitCode::SUCCESS
        }
        Err(e) => {
            let _ = lock.flush();
            eprintln!("trapfid: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
