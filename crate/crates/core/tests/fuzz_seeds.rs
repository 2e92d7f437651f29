//! Replays the checked-in fuzz corpora through the parsers so the seeds stay
//! meaningful: each corpus must contain inputs that parse and inputs that
//! are rejected.

use std::fs;
use std::path::PathBuf;

use crfsim::model::PhysicalParams;
use crfsim::runner::SweepSpec;
use crfsim::table::ResultTable;

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<(String, Vec<u8>)> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())
        })
        .collect();
    out.sort();
    out
}

fn outcomes(target: &str, parse: impl Fn(&[u8]) -> bool) -> Vec<(String, bool)> {
    seeds(target).into_iter().map(|(name, data)| (name, parse(&data))).collect()
}

#[test]
fn params_seeds() {
    let got = outcomes("params_json", |d| {
        std::str::from_utf8(d).ok().is_some_and(|s| PhysicalParams::from_json_str(s).is_ok())
    });
    assert_eq!(
        got,
        [("bare_names.json".into(), true), ("sr88.json".into(), true), ("wrong_units.json".into(), false)]
    );
}

#[test]
fn sweep_manifest_seeds() {
    let got = outcomes("sweep_manifest", |d| {
        std::str::from_utf8(d).ok().is_some_and(|s| SweepSpec::from_json_str(s).is_ok())
    });
    assert_eq!(
        got,
        [
            ("atom_number.json".into(), true),
            ("empty_values.json".into(), false),
            ("ideal_homog.json".into(), true),
            ("ramp.json".into(), true),
        ]
    );
}

#[test]
fn result_table_seeds() {
    let got = outcomes("result_table", |d| ResultTable::from_reader(d).is_ok());
    assert_eq!(
        got,
        [("duplicate_header.csv".into(), false), ("sweep.csv".into(), true), ("trace.csv".into(), true)]
    );
}
