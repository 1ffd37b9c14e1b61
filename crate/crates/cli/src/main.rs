use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let out = nvmix_cli::run_args(std::env::args_os().skip(1));
    let mut stdout = std::io::stdout().lock();
    if stdout.write_all(out.document.as_bytes()).and_then(|_| stdout.flush()).is_err() {
        return ExitCode::from(1);
    }
    ExitCode::from(out.exit_code as u8)
}
