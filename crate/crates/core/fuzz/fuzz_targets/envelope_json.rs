#![no_main]

use libfuzzer_sys::fuzz_target;
use ratdiff::io::emit::render_json;
use ratdiff::io::parse_json;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(envelope) = parse_json(text) {
        let printed = render_json(&envelope).expect("parsed envelope must render");
        let back = parse_json(&printed).expect("rendered envelope must parse");
        assert_eq!(back, envelope);
    }
});
