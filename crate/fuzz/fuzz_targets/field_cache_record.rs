#![no_main]

use glnq_core::field_tower::FieldCacheRecord;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(rec) = FieldCacheRecord::parse(text) {
        assert_eq!(rec.modulus.len() as u64, rec.e as u64 * rec.big_n + 1);
        assert_eq!(rec.modulus.last(), Some(&1));
    }
});
