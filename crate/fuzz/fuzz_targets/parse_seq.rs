#![no_main]
use libfuzzer_sys::fuzz_target;
use rankone_core::seq::GeomTailSeq;

fuzz_target!(|data: &[u8]| {
    if let Ok(v) = serde_json::from_slice::<GeomTailSeq>(data) {
        let _ = v.norm_sq();
        let _ = v.head(16);
        let back = serde_json::to_vec(&v).unwrap();
        let again: GeomTailSeq = serde_json::from_slice(&back).unwrap();
        assert_eq!(again.prefix().len(), v.prefix().len());
    }
});
