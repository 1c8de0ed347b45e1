#![no_main]

use libfuzzer_sys::fuzz_target;
use translab_core::curvature::Exponent;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(e) = text.parse::<Exponent>() else { return };
    assert!(e.to_f64() > 0.0);
    assert_eq!(e.to_string().parse::<Exponent>().expect("display parses"), e);
});
