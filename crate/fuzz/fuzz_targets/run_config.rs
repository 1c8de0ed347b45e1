#![no_main]

use libfuzzer_sys::fuzz_target;
use translab_cli::config::RunConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(cfg) = RunConfig::from_json(text) else { return };
    let json = serde_json::to_string(&cfg).expect("config serializes");
    let back = RunConfig::from_json(&json).expect("serialized config parses");
    assert_eq!(serde_json::to_string(&back).unwrap(), json);
    if cfg.gamma_file.is_none() {
        let _ = cfg.resolve("mean");
    }
});
