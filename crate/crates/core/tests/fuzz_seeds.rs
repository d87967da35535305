//! Every checked-in fuzz seed must be accepted by its parser and round-trip.

use std::fs;
use std::path::PathBuf;

use glnq_core::cyclotomic::CyclotomicJson;
use glnq_core::field_tower::FieldCacheRecord;
use glnq_core::matrix_group::ClassIndex;
use glnq_core::partitions_sym::Partition;
use glnq_core::poly_irr::PolyQ;

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let path = e.unwrap().path();
            (path.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&path).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

fn text(b: &[u8]) -> &str {
    std::str::from_utf8(b).expect("utf-8 seed")
}

#[test]
fn poly_text_seeds() {
    const QS: [u64; 8] = [2, 3, 4, 5, 7, 8, 9, 16];
    for (name, data) in seeds("poly_text") {
        let q = QS[data[0] as usize % QS.len()];
        let f = PolyQ::parse(text(&data[1..]), q).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(PolyQ::parse(&f.to_text(), q).unwrap(), f, "{name}");
    }
}

#[test]
fn partition_seeds() {
    for (name, data) in seeds("partition") {
        let p = Partition::parse(text(&data)).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(Partition::parse(&p.to_string()).unwrap(), p, "{name}");
    }
}

#[test]
fn class_index_seeds() {
    for (name, data) in seeds("class_index_json") {
        let q = [2u64, 3, 4, 5][data[0] as usize % 4];
        let idx = ClassIndex::parse_json(text(&data[1..]), q).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(ClassIndex::parse_json(&idx.to_json_value().to_string(), q).unwrap(), idx, "{name}");
    }
}

#[test]
fn cyclotomic_seeds() {
    for (name, data) in seeds("cyclotomic_json") {
        let s = CyclotomicJson::parse(text(&data)).unwrap_or_else(|e| panic!("{name}: {e}"));
        let back = CyclotomicJson::parse(&serde_json::to_string(&s.to_json()).unwrap()).unwrap();
        assert!(back.try_eq(&s).unwrap(), "{name}");
    }
}

#[test]
fn field_cache_seeds() {
    for (name, data) in seeds("field_cache_record") {
        FieldCacheRecord::parse(text(&data)).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn malformed_inputs_are_rejected() {
    assert!(PolyQ::parse("z^2++1", 2).is_err());
    assert!(PolyQ::parse("z^99999", 2).is_err());
    assert!(Partition::parse("3,0").is_err());
    assert!(ClassIndex::parse_json(r#"[{"poly":[0,1],"partition":[1]}]"#, 2).is_err());
    assert!(CyclotomicJson::parse(r#"{"modulus":3,"terms":[[5,"1"]]}"#).is_err());
    assert!(CyclotomicJson::parse(r#"{"modulus":3,"terms":[[1,"1/0"]]}"#).is_err());
    // z^6 + z^3 + 1 is irreducible but not primitive
    assert!(FieldCacheRecord::parse(r#"{"p":2,"e":1,"n":3,"N":6,"modulus":[1,0,0,1,0,0,1]}"#).is_err());
}
