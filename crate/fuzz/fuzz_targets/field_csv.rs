#![no_main]

use darboux_core::fields::parse_field_csv;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(f) = parse_field_csv(data) {
        // Every node of an accepted grid is inside the domain.
        let d = f.domain();
        assert!(f.value(d.center()).is_ok());
    }
});
