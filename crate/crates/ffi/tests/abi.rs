use std::ffi::{c_char, CStr, CString};
use std::process::Command;
use std::ptr;

use funcnet_ffi::*;
use serde_json::Value as Json;

const MODEL: &str = include_str!("../../../models/central_locking.fnet");
const NOMINAL: &str = include_str!("../../../models/nominal.stim");
const FLAT: &str = include_str!("../../../models/flat.stim");
const EXTRA: &str = include_str!("../../../models/extra_event.trace");
const HEADER: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/include/funcnet.h");

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

/// Takes ownership of a library string.
fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let owned = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { fnet_string_free(s) };
    owned
}

fn last_error() -> Option<String> {
    let p = fnet_last_error();
    (!p.is_null()).then(|| unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string())
}

struct Handle(*mut FnetModel);

impl Drop for Handle {
    fn drop(&mut self) {
        unsafe { fnet_model_free(self.0) };
    }
}

fn parse(text: &str) -> Result<Handle, (FnetStatus, String)> {
    let text = c(text);
    let name = c("model.fnet");
    let mut out = ptr::null_mut();
    match unsafe { fnet_model_parse(text.as_ptr(), name.as_ptr(), &mut out) } {
        FnetStatus::Ok => Ok(Handle(out)),
        status => {
            assert!(out.is_null());
            Err((status, last_error().unwrap()))
        }
    }
}

fn check(m: &Handle) -> (FnetStatus, Json) {
    let mut json = ptr::null_mut();
    let status = unsafe { fnet_model_check(m.0, &mut json) };
    (status, serde_json::from_str(&take(json)).unwrap())
}

fn run(m: &Handle, events: &str, horizon: Option<u64>) -> (FnetStatus, Option<Json>) {
    let scenario = c("SpeedAutoLock");
    let events = c(events);
    let mut json = ptr::null_mut();
    let status = unsafe {
        match horizon {
            Some(h) => fnet_model_run_stimuli(m.0, scenario.as_ptr(), events.as_ptr(), h, &mut json),
            None => fnet_model_run_trace(m.0, scenario.as_ptr(), events.as_ptr(), &mut json),
        }
    };
    let doc = (!json.is_null()).then(|| serde_json::from_str(&take(json)).unwrap());
    (status, doc)
}

#[test]
fn check_the_corpus() {
    let m = parse(MODEL).unwrap();
    assert!(unsafe { fnet_model_element_count(m.0) } >= 4);
    let (status, doc) = check(&m);
    assert_eq!(status, FnetStatus::Ok);
    assert_eq!(doc["verdict"], "CONSISTENT");
    assert_eq!(doc["artifacts"].as_array().unwrap().len(), 9);
    assert!(last_error().is_none());
}

#[test]
fn findings_are_reported() {
    let text = format!("{MODEL}\nview Bad on CarComfort {{ block left {{ block Arbiter }} }}\n");
    let m = parse(&text).unwrap();
    let (status, doc) = check(&m);
    assert_eq!(status, FnetStatus::Findings);
    assert_eq!(doc["verdict"], "INCONSISTENT");
    assert_eq!(doc["findings"][0]["condition"], "C2");
}

#[test]
fn parse_errors_carry_locations() {
    let (status, message) = parse("net N {\n  block A {}\n  connect S : A B\n}\n").err().unwrap();
    assert_eq!(status, FnetStatus::ParseError);
    assert!(message.contains("model.fnet:3:17"), "{message}");
}

#[test]
fn run_outcomes_map_to_status() {
    let m = parse(MODEL).unwrap();
    let (status, doc) = run(&m, NOMINAL, Some(4));
    assert_eq!(status, FnetStatus::Ok);
    assert_eq!(doc.unwrap()["outcome"], "PASS");
    let (status, doc) = run(&m, FLAT, Some(4));
    assert_eq!(status, FnetStatus::Inconclusive);
    assert_eq!(doc.unwrap()["outcome"], "INCONCLUSIVE");
    let (status, doc) = run(&m, EXTRA, None);
    assert_eq!(status, FnetStatus::Findings);
    let doc = doc.unwrap();
    assert_eq!(doc["outcome"], "FAIL");
    assert_eq!(doc["failingStep"], 1);
}

#[test]
fn run_errors() {
    let m = parse(MODEL).unwrap();
    assert_eq!(run(&m, NOMINAL, Some(0)), (FnetStatus::UsageError, None));
    assert_eq!(run(&m, "2 A -> B S 1\n1 A -> B S 2\n", None), (FnetStatus::ParseError, None));
    assert!(last_error().unwrap().contains("line 2"));

    let scenario = c("Nope");
    let trace = c(EXTRA);
    let mut json = ptr::null_mut();
    let status = unsafe { fnet_model_run_trace(m.0, scenario.as_ptr(), trace.as_ptr(), &mut json) };
    assert_eq!(status, FnetStatus::UsageError);
    assert!(json.is_null());
    assert!(last_error().unwrap().contains("Nope"));

    let broken = parse(&MODEL.replace("3 Arbiter -> left : CmdOpenClose", "3 Arbiter -> left : Warp")).unwrap();
    assert_eq!(run(&broken, EXTRA, None), (FnetStatus::Findings, None));
    assert!(last_error().unwrap().contains("not consistent"));
}

#[test]
fn render_round_trips() {
    let m = parse(MODEL).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { fnet_model_render(m.0, &mut out) }, FnetStatus::Ok);
    assert_eq!(take(out), MODEL);
}

#[test]
fn null_arguments_are_rejected() {
    let mut model = ptr::null_mut();
    let mut json = ptr::null_mut();
    unsafe {
        assert_eq!(fnet_model_parse(ptr::null(), ptr::null(), &mut model), FnetStatus::NullArgument);
        assert!(model.is_null());
        let text = c(MODEL);
        assert_eq!(fnet_model_parse(text.as_ptr(), ptr::null(), ptr::null_mut()), FnetStatus::NullArgument);
        assert_eq!(fnet_model_check(ptr::null(), &mut json), FnetStatus::NullArgument);
        assert_eq!(fnet_model_render(ptr::null(), &mut json), FnetStatus::NullArgument);
        assert_eq!(fnet_model_element_count(ptr::null()), 0);
        fnet_model_free(ptr::null_mut());
        fnet_string_free(ptr::null_mut());

        assert_eq!(fnet_model_parse(text.as_ptr(), ptr::null(), &mut model), FnetStatus::Ok);
        let m = Handle(model);
        assert_eq!(fnet_model_check(m.0, ptr::null_mut()), FnetStatus::NullArgument);
        let s = c("SpeedAutoLock");
        assert_eq!(fnet_model_run_trace(m.0, s.as_ptr(), ptr::null(), &mut json), FnetStatus::NullArgument);
        assert!(json.is_null());
    }
    assert!(last_error().unwrap().contains("null"));
}

#[test]
fn invalid_utf8_is_rejected() {
    let bytes = CString::new(vec![b'n', 0xff, b'x']).unwrap();
    let mut model = ptr::null_mut();
    let status = unsafe { fnet_model_parse(bytes.as_ptr(), ptr::null(), &mut model) };
    assert_eq!(status, FnetStatus::InvalidUtf8);
}

#[test]
fn version_matches_the_crate() {
    let v = unsafe { CStr::from_ptr(fnet_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_the_interface() {
    let header = std::fs::read_to_string(HEADER).unwrap();
    for name in [
        "FnetStatus",
        "FNET_STATUS_INCONCLUSIVE = 4",
        "typedef struct FnetModel FnetModel",
        "fnet_model_parse",
        "fnet_model_free",
        "fnet_model_element_count",
        "fnet_model_check",
        "fnet_model_render",
        "fnet_model_run_trace",
        "fnet_model_run_stimuli",
        "fnet_string_free",
        "fnet_last_error",
        "fnet_version",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

#[test]
fn header_compiles_as_c() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("t.c");
    std::fs::write(
        &src,
        "#include \"funcnet.h\"\nint main(void) { FnetModel *m = 0; return (int)fnet_model_parse(0, 0, &m); }\n",
    )
    .unwrap();
    let include = concat!(env!("CARGO_MANIFEST_DIR"), "/include");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let out = match Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I", include])
        .arg(&src)
        .output()
    {
        Ok(out) => out,
        Err(e) => {
            eprintln!("skipped: no C compiler `{cc}` ({e})");
            return;
        }
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
