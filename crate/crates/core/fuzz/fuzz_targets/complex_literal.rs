#![no_main]

use libfuzzer_sys::fuzz_target;
use ratdiff::io::literal::{format_complex, parse_complex};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(z) = parse_complex(text) {
        assert!(z.re.is_finite() && z.im.is_finite());
        let printed = format_complex(z);
        let back = parse_complex(&printed).expect("printed literal must parse");
        assert_eq!(back.re.to_bits(), z.re.to_bits(), "{printed}");
        assert_eq!(back.im.to_bits(), z.im.to_bits(), "{printed}");
    }
});
