#![no_main]

//! Fuzz the dataset CSV parser. The input is split at the first 0xFF byte
//! into a schema file and a dataset file; whenever both parse, the written
//! form must re-parse to an identical dataset.

use libfuzzer_sys::fuzz_target;

use osr_core::dataset::{parse_dataset, parse_schema};

fuzz_target!(|data: &[u8]| {
    let split = data.iter().position(|&b| b == 0xFF).unwrap_or(data.len());
    let (schema_bytes, rest) = data.split_at(split);
    let dataset_bytes = rest.get(1..).unwrap_or_default();
    let (Ok(schema_text), Ok(csv_text)) = (
        std::str::from_utf8(schema_bytes),
        std::str::from_utf8(dataset_bytes),
    ) else {
        return;
    };
    let Ok(schema) = parse_schema(schema_text) else {
        return;
    };
    if let Ok(dataset) = parse_dataset(csv_text, &schema) {
        let written = dataset.to_csv();
        let reparsed = parse_dataset(&written, &schema).expect("own output must parse");
        assert_eq!(reparsed, dataset, "write/parse round trip diverged");
        assert_eq!(reparsed.to_csv(), written, "second write diverged");
    }
});
