#![no_main]

use darboux_core::curvature::CurvatureSpec;
use darboux_core::Point;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(spec) = CurvatureSpec::from_json(text) {
        // A parsed spec must evaluate everywhere without panicking.
        let k = spec.k_eval(Point::new(0.5, 0.01));
        assert!(k.is_finite() && k >= 0.0);
    }
});
