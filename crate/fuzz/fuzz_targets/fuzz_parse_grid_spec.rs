#![no_main]

//! Fuzz the grid-specification parser; accepted specs must yield non-empty,
//! size-valid grids.

use libfuzzer_sys::fuzz_target;

use osr_core::evaluation::parse_grid_spec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    for allow_any in [false, true] {
        if let Ok(grid) = parse_grid_spec(text, allow_any) {
            assert!(!grid.is_empty());
            for combo in &grid {
                assert!(combo.min_set_size >= 2);
                assert!(combo.max_predicates_per_step >= 1);
            }
        }
    }
});
