use std::ffi::{CStr, CString};
use std::ptr;

use abelrd_ffi::*;

fn last_error() -> String {
    let p = abelrd_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

unsafe fn take(s: *mut std::ffi::c_char) -> String {
    let out = CStr::from_ptr(s).to_string_lossy().into_owned();
    abelrd_string_free(s);
    out
}

#[test]
fn group_round_trip() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(abelrd_group_cyclic(12, &mut g), AbelrdStatus::Ok);
        let mut name = ptr::null_mut();
        assert_eq!(abelrd_group_name(g, &mut name), AbelrdStatus::Ok);
        assert_eq!(take(name), "Z4+Z3");
        let (mut order, mut rank) = (0u64, 0usize);
        assert_eq!(abelrd_group_order(g, &mut order), AbelrdStatus::Ok);
        assert_eq!(abelrd_group_rank(g, &mut rank), AbelrdStatus::Ok);
        assert_eq!((order, rank), (12, 2));
        let mut sum = 0usize;
        // mixed-radix indices, last digit fastest: 11 = (3, 2) and 4 = (1, 1)
        assert_eq!(abelrd_group_add(g, 11, 1, &mut sum), AbelrdStatus::Ok);
        assert_eq!(sum, 9);
        assert_eq!(abelrd_group_add(g, 11, 4, &mut sum), AbelrdStatus::Ok);
        assert_eq!(sum, 0);
        assert_eq!(abelrd_group_add(g, 12, 0, &mut sum), AbelrdStatus::InvalidArgument);
        abelrd_group_free(g);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut g = ptr::null_mut();
        let bad = CString::new("Z0").unwrap();
        assert_eq!(abelrd_group_parse(bad.as_ptr(), &mut g), AbelrdStatus::InvalidArgument);
        assert!(g.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(abelrd_group_parse(ptr::null(), &mut g), AbelrdStatus::NullPointer);
        assert!(last_error().contains("null"));
        let mut order = 0;
        assert_eq!(abelrd_group_order(ptr::null(), &mut order), AbelrdStatus::NullPointer);
        // a successful call clears the message
        assert_eq!(abelrd_group_cyclic(2, &mut g), AbelrdStatus::Ok);
        assert!(abelrd_last_error().is_null());
        abelrd_group_free(g);
        abelrd_group_free(ptr::null_mut());
        abelrd_string_free(ptr::null_mut());
    }
}

#[test]
fn entropies_and_rates() {
    unsafe {
        // X uniform on Z4, Z = X + N with N in {0, 2}
        let mut table = [0.0; 16];
        for x in 0..4 {
            table[x * 4 + x] = 0.125;
            table[x * 4 + (x + 2) % 4] = 0.125;
        }
        let shape = [4usize, 4];
        let mut pmf = ptr::null_mut();
        assert_eq!(abelrd_pmf_new(table.as_ptr(), 16, shape.as_ptr(), 2, &mut pmf), AbelrdStatus::Ok);
        let mut h = 0.0;
        let both = [0usize, 1];
        assert_eq!(abelrd_pmf_entropy(pmf, both.as_ptr(), 2, &mut h), AbelrdStatus::Ok);
        assert!((h - 3.0).abs() < 1e-12);
        let (t, g) = ([1usize], [0usize]);
        assert_eq!(abelrd_pmf_conditional_entropy(pmf, t.as_ptr(), 1, g.as_ptr(), 1, &mut h), AbelrdStatus::Ok);
        assert!((h - 1.0).abs() < 1e-12);

        // no group on the axis yet
        let mut r = 0.0;
        assert_eq!(abelrd_source_code_rate(pmf, 1, g.as_ptr(), 1, &mut r), AbelrdStatus::InvalidArgument);
        let mut z4 = ptr::null_mut();
        assert_eq!(abelrd_group_cyclic(4, &mut z4), AbelrdStatus::Ok);
        assert_eq!(abelrd_pmf_attach_group(pmf, 1, z4), AbelrdStatus::Ok);
        // H(U|X) = 1 = log 2: the source rate is min(H(U), 2 |H(U|X) - 1|) = 0
        assert_eq!(abelrd_source_code_rate(pmf, 1, g.as_ptr(), 1, &mut r), AbelrdStatus::Ok);
        assert!(r.abs() < 1e-12, "{r}");
        // channel rate with no side information: max(H(U), 2 (H(U) - H([U]_1))) = 2
        assert_eq!(abelrd_channel_code_rate(pmf, 1, ptr::null(), 0, &mut r), AbelrdStatus::Ok);
        assert!((r - 2.0).abs() < 1e-12, "{r}");

        let short = [0.5, 0.4];
        let one = [2usize];
        let mut bad = ptr::null_mut();
        assert_eq!(abelrd_pmf_new(short.as_ptr(), 2, one.as_ptr(), 1, &mut bad), AbelrdStatus::InvalidArgument);
        abelrd_group_free(z4);
        abelrd_pmf_free(pmf);
    }
}

#[test]
fn region_json_for_lossless_xor() {
    let spec = CString::new(
        r#"{"pmf": [[0.45, 0.05], [0.05, 0.45]],
            "distortion": {"preset": "hamming-on-function", "function": [[0, 1], [1, 0]]},
            "groups": {"policy": "list", "groups": ["Z2"]}}"#,
    )
    .unwrap();
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(abelrd_region_json(spec.as_ptr(), AbelrdRegionMode::Theorem1, &mut out), AbelrdStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        let best = v["problems"][0]["theorem1"]["best_by_group"]["Z2"]["sum_rate"].as_f64().unwrap();
        let h = -(0.1f64 * 0.1f64.log2() + 0.9 * 0.9f64.log2());
        assert!((best - 2.0 * h).abs() < 1e-9);
        assert!(v["problems"][0].get("berger_tung").is_none());

        let bad = CString::new("{}").unwrap();
        assert_eq!(abelrd_region_json(bad.as_ptr(), AbelrdRegionMode::Both, &mut out), AbelrdStatus::InvalidArgument);
    }
}

#[test]
fn simulation_report() {
    let check = CString::new("lemma8").unwrap();
    let cfg = CString::new(r#"{"p": 3, "r": 2, "n": 1, "k": 0}"#).unwrap();
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(abelrd_simulate_json(check.as_ptr(), cfg.as_ptr(), ptr::null(), &mut out), AbelrdStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(v["passed"], true);
        let unknown = CString::new("lemma9").unwrap();
        assert_eq!(abelrd_simulate_json(unknown.as_ptr(), cfg.as_ptr(), ptr::null(), &mut out), AbelrdStatus::InvalidArgument);
    }
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(abelrd_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
