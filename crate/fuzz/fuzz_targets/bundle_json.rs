#![no_main]

use libfuzzer_sys::fuzz_target;

// Past the outer JSON parse, drive every artifact-reconstruction path:
// the validation layers must reject, never panic or overflow.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(bundle) = framelet::io::bundle_from_json(text) else { return };
    if let Some(m) = &bundle.chain {
        let _ = framelet::io::chain_from_manifest(m);
    }
    let _ = framelet::io::basis_from_bundle(&bundle);
    if let Some(p) = &bundle.filter_bank {
        let _ = framelet::io::filter_bank_from_payload(p);
    }
    if let Some(p) = &bundle.coefficients {
        let _ = framelet::io::coefficients_from_payload(p, None);
    }
});
