#![no_main]

use darboux_cli::args::{parse_interval, parse_point, parse_positive};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(p) = parse_point(s) {
        assert!(p.x.is_finite() && p.y.is_finite());
    }
    if let Ok((a, b)) = parse_interval(s) {
        assert!(a < b);
    }
    if let Ok(v) = parse_positive(s) {
        assert!(v > 0.0 && v.is_finite());
    }
});
