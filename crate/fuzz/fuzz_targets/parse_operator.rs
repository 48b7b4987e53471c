#![no_main]
use libfuzzer_sys::fuzz_target;
use rankone_core::operators::OperatorExpr;
use rankone_core::seq::GeomTailSeq;

fuzz_target!(|data: &[u8]| {
    let Ok(op) = serde_json::from_slice::<OperatorExpr>(data) else {
        return;
    };
    if op.validate().is_err() {
        return;
    }
    let e0 = GeomTailSeq::basis(0);
    let _ = op.apply(&e0);
    let _ = op.apply_adjoint(&e0);
});
