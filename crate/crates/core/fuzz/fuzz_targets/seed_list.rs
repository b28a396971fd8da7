#![no_main]

use libfuzzer_sys::fuzz_target;
use ratdiff::io::literal::{format_seed, parse_seed, parse_seed_list};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let _ = parse_seed(text);
    if let Ok(seeds) = parse_seed_list(text) {
        let printed: Vec<String> = seeds.iter().map(format_seed).collect();
        let back = parse_seed_list(&printed.join(";")).expect("printed seeds must parse");
        assert_eq!(back, seeds);
    }
});
