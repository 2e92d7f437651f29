#![no_main]

use crfsim::table::ResultTable;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(t) = ResultTable::from_reader(data) {
        assert!(t.rows.iter().all(|r| r.len() == t.columns.len()));
        for c in &t.columns {
            let _ = t.numeric_column(c);
        }
    }
});
