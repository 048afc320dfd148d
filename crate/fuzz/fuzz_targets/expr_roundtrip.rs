//! Printing a parsed expression and parsing it again is a fixed point.

#![no_main]

use adapted_geom::parse;
use libfuzzer_sys::fuzz_target;

const COORDS: [&str; 3] = ["x", "y", "z"];

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(e) = parse(text, &COORDS) else {
        return;
    };
    let printed = e.display(&COORDS).to_string();
    let back = parse(&printed, &COORDS).expect("printed expression parses");
    assert_eq!(back, e, "{printed}");
});
