#![no_main]

use libfuzzer_sys::fuzz_target;
use translab_core::{CurvatureFunction, GammaSpec};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(spec) = GammaSpec::from_json(text) else { return };
    let Ok(gamma) = spec.build() else { return };
    // canonical specs round-trip exactly
    let canonical = GammaSpec::from(&gamma);
    let again = GammaSpec::from_json(&canonical.to_json()).expect("canonical spec parses");
    assert_eq!(again, canonical);
    let rebuilt = again.build().expect("canonical spec builds");
    if gamma.n() <= 16 {
        let ones = vec![1.0; gamma.n()];
        let (a, b) = (gamma.value(&ones), rebuilt.value(&ones));
        assert!(a == b || (a.is_nan() && b.is_nan()));
    }
});
