#![no_main]

use libfuzzer_sys::fuzz_target;
use ratdiff::io::parse_args;

// argv elements are separated by NUL bytes
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let argv: Vec<&str> = text.split('\0').collect();
    if argv.iter().any(|a| a.starts_with("--config")) {
        return;
    }
    if let Ok(spec) = parse_args(&argv) {
        let replay = parse_args(&spec.to_args()).expect("regenerated argv must parse");
        assert_eq!(replay, spec);
    }
});
