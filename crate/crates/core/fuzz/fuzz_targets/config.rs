#![no_main]

use libfuzzer_sys::fuzz_target;
use ratdiff::io::config::parse_config;
use ratdiff::io::runspec::parse_config_spec;
use ratdiff::io::Command;

const COMMANDS: [Command; 9] = [
    Command::Orbit,
    Command::Equilibria,
    Command::Stability,
    Command::Trichotomy,
    Command::Period,
    Command::Lyapunov,
    Command::Scan,
    Command::Grid,
    Command::Identities,
];

fuzz_target!(|data: &[u8]| {
    let Some((&selector, rest)) = data.split_first() else {
        return;
    };
    let Ok(text) = std::str::from_utf8(rest) else {
        return;
    };
    if let Ok(entries) = parse_config(text) {
        assert!(entries
            .iter()
            .all(|e| !e.key.is_empty() && !e.value.is_empty()));
    }
    let command = COMMANDS[selector as usize % COMMANDS.len()];
    let _ = parse_config_spec(command, text);
});
