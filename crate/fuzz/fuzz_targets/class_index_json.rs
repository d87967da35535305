#![no_main]

use glnq_core::matrix_group::ClassIndex;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Some((&sel, rest)) = data.split_first() else { return };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let q = [2u64, 3, 4, 5][sel as usize % 4];
    if let Ok(idx) = ClassIndex::parse_json(text, q) {
        let back = ClassIndex::parse_json(&idx.to_json_value().to_string(), q).expect("round trip");
        assert_eq!(back, idx);
        let _ = idx.norm();
        let _ = idx.cycle_type();
    }
});
