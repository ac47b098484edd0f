#![no_main]

//! Fuzz the category-mapping file parser.

use libfuzzer_sys::fuzz_target;

use osr_core::preprocess::CategoryMapping;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = CategoryMapping::parse_csv(text);
    }
});
