use std::ffi::{CStr, CString};
use std::ptr;

use entropy_forge_ffi::*;

fn last_error() -> String {
    let p = ef_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn uniform_symbols(len: usize) -> Vec<u16> {
    let mut x: u64 = 0x2545_f491_4f6c_dd1d;
    (0..len)
        .map(|_| {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            (x >> 56) as u16
        })
        .collect()
}

#[test]
fn version_is_crate_version() {
    let v = unsafe { CStr::from_ptr(ef_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn stream_round_trip_and_entropy() {
    let symbols = uniform_symbols(50_000);
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(
            ef_stream_from_symbols(8, symbols.as_ptr(), symbols.len(), &mut s),
            EfStatus::Ok
        );
        assert_eq!(ef_stream_len(s), 50_000);
        assert_eq!(ef_stream_bits(s), 8);

        let mut buf = vec![0u16; 10];
        let mut written = 0;
        assert_eq!(
            ef_stream_copy_symbols(s, buf.as_mut_ptr(), buf.len(), &mut written),
            EfStatus::Ok
        );
        assert_eq!(written, 10);
        assert_eq!(buf, symbols[..10]);

        let mut h = 0.0;
        assert_eq!(ef_shannon_entropy(s, &mut h), EfStatus::Ok);
        assert!(h > 7.99 && h <= 8.0, "{h}");
        let mut hmin = 0.0;
        assert_eq!(ef_min_entropy(s, &mut hmin), EfStatus::Ok);
        assert!(hmin > 7.0 && hmin < h);

        let dir = tempfile::tempdir().unwrap();
        let path = CString::new(dir.path().join("s.bin").to_str().unwrap()).unwrap();
        assert_eq!(ef_stream_write(s, path.as_ptr()), EfStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(ef_stream_read(path.as_ptr(), &mut back), EfStatus::Ok);
        assert_eq!(ef_stream_len(back), 50_000);
        ef_stream_free(back);
        ef_stream_free(s);
    }
}

#[test]
fn errors_map_to_codes_with_messages() {
    let mut s = ptr::null_mut();
    unsafe {
        let bad = [300u16];
        assert_eq!(
            ef_stream_from_symbols(8, bad.as_ptr(), 1, &mut s),
            EfStatus::Parameter
        );
        assert!(s.is_null());
        assert!(!last_error().is_empty());

        assert_eq!(
            ef_stream_from_symbols(8, ptr::null(), 4, &mut s),
            EfStatus::NullPointer
        );
        assert!(last_error().contains("symbols"));

        let missing = CString::new("/nonexistent/dir/stream.bin").unwrap();
        assert_eq!(ef_stream_read(missing.as_ptr(), &mut s), EfStatus::Io);
        assert!(last_error().contains("/nonexistent/dir/stream.bin"));

        let junk = CString::new("{\"no_such_field\": 1}").unwrap();
        assert_eq!(
            ef_stream_simulate(junk.as_ptr(), ptr::null(), 10, &mut s),
            EfStatus::Json
        );

        let mut h = 0.0;
        assert_eq!(
            ef_shannon_entropy(ptr::null(), &mut h),
            EfStatus::NullPointer
        );
    }
    // A successful call clears the message.
    let one = [1u16, 2, 3];
    unsafe {
        assert_eq!(
            ef_stream_from_symbols(8, one.as_ptr(), 3, &mut s),
            EfStatus::Ok
        );
        assert!(ef_last_error_message().is_null());
        ef_stream_free(s);
    }
}

#[test]
fn simulate_is_deterministic() {
    let device = CString::new(r#"{"duration": 0.002, "seed": 11}"#).unwrap();
    let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
    unsafe {
        assert_eq!(
            ef_stream_simulate(device.as_ptr(), ptr::null(), 300, &mut a),
            EfStatus::Ok
        );
        assert_eq!(
            ef_stream_simulate(device.as_ptr(), ptr::null(), 300, &mut b),
            EfStatus::Ok
        );
        let mut x = vec![0u16; 300];
        let mut y = vec![0u16; 300];
        let mut w = 0;
        ef_stream_copy_symbols(a, x.as_mut_ptr(), 300, &mut w);
        ef_stream_copy_symbols(b, y.as_mut_ptr(), 300, &mut w);
        assert_eq!(w, 300);
        assert_eq!(x, y);
        ef_stream_free(a);
        ef_stream_free(b);
    }
}

#[test]
fn assess_returns_json_report() {
    let symbols = uniform_symbols(20_000);
    let mut s = ptr::null_mut();
    let config = CString::new(r#"{"permutations": 200, "seed": 1}"#).unwrap();
    let mut report = ptr::null_mut();
    unsafe {
        ef_stream_from_symbols(8, symbols.as_ptr(), symbols.len(), &mut s);
        assert_eq!(ef_assess(s, config.as_ptr(), &mut report), EfStatus::Ok);
        let json: serde_json::Value =
            serde_json::from_str(CStr::from_ptr(report).to_str().unwrap()).unwrap();
        ef_string_free(report);
        ef_stream_free(s);
        assert_eq!(json["samples"], 20_000);
        assert_eq!(json["permutations"], 200);
        assert_eq!(json["sequential_sanity_check"], "NA");
    }
}

#[test]
fn health_monitor_flags_stuck_source() {
    let mut m = ptr::null_mut();
    unsafe {
        assert_eq!(
            ef_health_new(8.0, 512, 1.0 / 1_048_576.0, &mut m),
            EfStatus::Ok
        );
        let good = uniform_symbols(4096);
        let mut alarms = 0;
        assert_eq!(
            ef_health_feed(m, good.as_ptr(), good.len(), &mut alarms),
            EfStatus::Ok
        );
        assert_eq!(alarms, 0);
        let stuck = vec![7u16; 64];
        assert_eq!(
            ef_health_feed(m, stuck.as_ptr(), stuck.len(), &mut alarms),
            EfStatus::Ok
        );
        assert!(alarms >= 1);

        let mut report = ptr::null_mut();
        assert_eq!(ef_health_report(m, &mut report), EfStatus::Ok);
        let json: serde_json::Value =
            serde_json::from_str(CStr::from_ptr(report).to_str().unwrap()).unwrap();
        ef_string_free(report);
        assert_eq!(json["samples"], 4096 + 64);
        assert_eq!(json["repetition_cutoff"], 4);
        ef_health_free(m);

        assert_eq!(ef_health_new(0.0, 512, 0.5, &mut m), EfStatus::Parameter);
    }
}

#[test]
fn random_source_draws_and_exhausts() {
    let mut src = ptr::null_mut();
    let bytes = [0b1010_0000u8];
    unsafe {
        assert_eq!(
            ef_source_from_bytes(bytes.as_ptr(), 1, &mut src),
            EfStatus::Ok
        );
        let mut v = 0;
        // m = 4 takes two bits: 0b10.
        assert_eq!(ef_draw_uniform(src, 4, &mut v), EfStatus::Ok);
        assert_eq!(v, 2);
        assert_eq!(ef_source_consumed(src), 2);
        let mut b = 9;
        assert_eq!(ef_draw_bernoulli(src, 0.5, &mut b), EfStatus::Ok);
        assert!(b <= 1);
        let mut big = 0;
        assert_eq!(ef_draw_uniform(src, 1 << 20, &mut big), EfStatus::Exhausted);
        assert!(last_error().contains("exhausted"));
        ef_source_free(src);
    }
}

#[test]
fn free_functions_accept_null() {
    unsafe {
        ef_stream_free(ptr::null_mut());
        ef_source_free(ptr::null_mut());
        ef_health_free(ptr::null_mut());
        ef_string_free(ptr::null_mut());
        assert_eq!(ef_stream_len(ptr::null()), 0);
    }
}
