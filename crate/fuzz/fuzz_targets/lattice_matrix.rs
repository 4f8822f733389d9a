#![no_main]

use libfuzzer_sys::fuzz_target;
use nsh_core::lattice::{distinctness_condition, lattice_same, parse_exact, ExactMatrix, LatticeSpec};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let _ = parse_exact(text);
    if let Ok(m) = ExactMatrix::parse(text) {
        assert_eq!(ExactMatrix::parse(&m.to_string()).as_ref(), Ok(&m));
        let _ = lattice_same(&m);
        let _ = distinctness_condition(&m);
        let _ = m.inverse();
    }
    if let Ok(spec) = LatticeSpec::parse(text) {
        let _ = spec.transition_to(&spec);
    }
});
