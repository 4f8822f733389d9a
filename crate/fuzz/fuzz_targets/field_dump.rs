#![no_main]

use libfuzzer_sys::fuzz_target;
use nsh_core::io::FieldDump;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(dump) = FieldDump::parse(text) {
        if let Ok(u) = dump.to_field() {
            let again = FieldDump::of(&u, dump.header.repr).to_string();
            assert!(FieldDump::parse(&again).is_ok());
        }
    }
});
