#![no_main]

use glnq_core::partitions_sym::Partition;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(p) = Partition::parse(text) {
        assert!(p.parts().windows(2).all(|w| w[0] >= w[1]));
        assert_eq!(Partition::parse(&p.to_string()).expect("display parses"), p);
        assert_eq!(p.conjugate().conjugate(), p);
    }
});
