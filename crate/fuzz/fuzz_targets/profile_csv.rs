#![no_main]

use libfuzzer_sys::fuzz_target;
use translab_core::bowl::ProfileTable;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(table) = ProfileTable::parse(text) else { return };
    let again = ProfileTable::parse(&table.to_csv()).expect("written table parses");
    assert_eq!(again.len(), table.len());
    for (a, b) in again.r.iter().zip(&table.r) {
        assert!(a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan()));
    }
});
