#![no_main]

use libfuzzer_sys::fuzz_target;
use nsh_cli::config::{parse_domain, BetaSpec, RawConfig, RunConfig};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(raw) = RawConfig::from_toml_str(text) {
        let _ = RunConfig::validate(&raw);
    }
    let _ = BetaSpec::parse(text);
    let _ = parse_domain(text, 1.0);
});
