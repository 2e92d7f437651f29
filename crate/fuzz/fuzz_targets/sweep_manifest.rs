#![no_main]

use crfsim::runner::SweepSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(spec) = SweepSpec::from_json_str(data) {
        assert!(!spec.values.is_empty());
        assert!(spec.values.iter().all(|v| v.is_finite()));
    }
});
