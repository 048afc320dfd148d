//! Arbitrary documents through the structure file reader and, when they
//! parse, one validation point.

#![no_main]

use adapted_geom::format::parse_structure_file;
use adapted_geom::{validate, SampleSpec};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok((def, spec)) = parse_structure_file(text) {
        let spec = SampleSpec { count: 1, ..spec };
        let _ = validate(&def, &spec);
    }
});
