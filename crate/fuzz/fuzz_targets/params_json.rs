#![no_main]

use crfsim::model::PhysicalParams;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(p) = PhysicalParams::from_json_str(data) {
        // Anything accepted must survive its own serialization.
        let again = PhysicalParams::from_json_str(&p.to_json()).expect("re-parse");
        assert_eq!(again.n_atoms, p.n_atoms);
    }
});
