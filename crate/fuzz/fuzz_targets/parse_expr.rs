//! Arbitrary text through the expression parser, evaluator and jets.

#![no_main]

use adapted_geom::parse;
use libfuzzer_sys::fuzz_target;

const COORDS: [&str; 5] = ["x1", "x2", "x3", "x4", "x5"];
const POINT: [f64; 5] = [0.3, -0.7, 0.1, 1.9, -2.5];

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(e) = parse(text, &COORDS) {
        assert!(e.arity() <= COORDS.len());
        // domain errors are fine, panics are not
        let value = e.eval(&POINT);
        let jet = e.eval_jet(&POINT);
        if let (Ok(v), Ok(j)) = (value, jet) {
            assert!(v.is_finite() && j.is_finite());
        }
    }
});
