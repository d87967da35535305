#![no_main]

use glnq_core::cyclotomic::CyclotomicJson;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(s) = CyclotomicJson::parse(text) {
        // equality may refuse very large moduli; it must not panic
        let _ = s.try_eq(&s.compress());
        let _ = s.to_rational();
        let _ = s.pretty();
    }
});
