#![no_main]

use glnq_core::poly_irr::PolyQ;
use libfuzzer_sys::fuzz_target;

const QS: [u64; 8] = [2, 3, 4, 5, 7, 8, 9, 16];

fuzz_target!(|data: &[u8]| {
    let Some((&sel, rest)) = data.split_first() else { return };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let q = QS[sel as usize % QS.len()];
    if let Ok(f) = PolyQ::parse(text, q) {
        assert!(f.coeffs().iter().all(|&c| (c as u64) < q));
        let again = PolyQ::parse(&f.to_text(), q).expect("rendered text parses");
        assert_eq!(again, f);
    }
});
