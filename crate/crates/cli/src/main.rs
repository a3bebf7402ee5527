use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let (code, out) = partpoisson_cli::run_args(std::env::args_os());
    let mut stream: Box<dyn Write> = if code == 2 {
        Box::new(std::io::stderr())
    } else {
        Box::new(std::io::stdout())
    };
    let _ = stream.write_all(out.as_bytes());
    ExitCode::from(code as u8)
}
