#![no_main]

//! Fuzz the schema file parser; it must reject or accept without panicking,
//! and accepted schemas must survive a write/parse cycle.

use libfuzzer_sys::fuzz_target;

use osr_core::dataset::{parse_schema, write_schema};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(schema) = parse_schema(text) {
        let written = write_schema(&schema);
        let reparsed = parse_schema(&written).expect("own output must parse");
        assert_eq!(reparsed, schema);
    }
});
