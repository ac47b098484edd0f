#![no_main]

//! Fuzz the split-rule file parser in both strictness modes.

use libfuzzer_sys::fuzz_target;

use osr_core::preprocess::SplitRule;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = SplitRule::parse_csv(text, false);
        let _ = SplitRule::parse_csv(text, true);
    }
});
