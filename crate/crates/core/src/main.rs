use std::process::ExitCode;

use ratdiff::io::{emit, execute, parse_args, Format};
use ratdiff::Error;

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let spec = match parse_args(&argv) {
        Ok(spec) => spec,
        Err(Error::Usage(msg)) if is_info_request(&argv) => {
            println!("{msg}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("ratdiff: {e}");
            return ExitCode::from(2);
        }
    };

    let envelope = execute(&spec);
    if let Some(err) = &envelope.error {
        eprintln!("ratdiff: {}", err.message);
        if let Err(e) = emit(&envelope, Format::Json, None) {
            eprintln!("ratdiff: {e}");
        }
        return ExitCode::from(err.code as u8);
    }
    match emit(&envelope, spec.format, spec.out.as_deref()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ratdiff: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn is_info_request(argv: &[String]) -> bool {
    argv.iter()
        .any(|a| matches!(a.as_str(), "--help" | "-h" | "--version" | "-V" | "help"))
}
