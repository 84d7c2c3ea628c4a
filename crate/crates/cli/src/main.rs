use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = densikit_cli::run(std::env::args_os(), &mut out, &mut err);
    std::io::stdout().write_all(&out).ok();
    std::io::stderr().write_all(&err).ok();
    ExitCode::from(code)
}
