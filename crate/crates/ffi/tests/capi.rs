use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use adamsext_ffi::*;

const X: &str = "module X {\n  gen x13:13\n  gen x15:15\n  gen x16:16\n  sq 2 x13 = x15\n  sq 1 x15 = x16\n}\n";

fn parse(src: &str) -> *mut AdxModule {
    let src = CString::new(src).unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { adx_module_parse(src.as_ptr(), &mut m) }, AdxStatus::Ok);
    m
}

fn last_error() -> String {
    let p = adx_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn parse_validate_and_free() {
    let m = parse(X);
    let mut n = usize::MAX;
    unsafe {
        assert_eq!(adx_module_violations(m, &mut n), AdxStatus::Ok);
        assert_eq!(n, 0);
        assert_eq!(adx_module_dimension(m), 3);
        adx_module_free(m);
    }

    let bad = parse("module B {\n  gen a:0\n  gen b:1\n  gen c:2\n  sq 1 a = b\n  sq 1 b = c\n}\n");
    let mut chart = ptr::null_mut();
    unsafe {
        assert_eq!(adx_module_violations(bad, &mut n), AdxStatus::Ok);
        assert_eq!(n, 1);
        assert_eq!(adx_chart_build(bad, ptr::null(), 3, 5, &mut chart), AdxStatus::InvalidModule);
        assert!(chart.is_null());
        adx_module_free(bad);
    }
}

#[test]
fn errors_are_reported() {
    let src = CString::new("module {").unwrap();
    let mut m = ptr::null_mut();
    unsafe {
        assert_eq!(adx_module_parse(src.as_ptr(), &mut m), AdxStatus::Parse);
        assert!(m.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(adx_module_parse(ptr::null(), &mut m), AdxStatus::NullPointer);
        assert_eq!(adx_module_violations(ptr::null(), ptr::null_mut()), AdxStatus::NullPointer);
        let missing = CString::new("/nonexistent/x.fdmod").unwrap();
        assert_eq!(adx_module_load(missing.as_ptr(), &mut m), AdxStatus::Io);
        adx_module_free(ptr::null_mut());
        adx_chart_free(ptr::null_mut());
        adx_string_free(ptr::null_mut());
    }
}

#[test]
fn chart_of_x_against_itself() {
    let x = parse(X);
    let mut chart = ptr::null_mut();
    unsafe {
        assert_eq!(adx_chart_build(x, x, 6, 14, &mut chart), AdxStatus::Ok);
        let shift = adx_chart_shift(chart);
        assert_eq!(shift, -3);
        let eight: Vec<usize> = (0..=6).map(|s| adx_chart_class_count(chart, 8 - shift, s)).collect();
        assert_eq!(eight, vec![0, 0, 2, 1, 0, 0, 0]);
        assert!(adx_chart_total_classes(chart) > 20);

        let mut json = ptr::null_mut();
        assert_eq!(adx_chart_render(chart, AdxFormat::Json, &mut json), AdxStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        adx_string_free(json);
        assert!(text.contains("\"shift\": -3"));

        adx_chart_free(chart);
        adx_module_free(x);
    }
}

#[test]
fn resolution_round_trip() {
    let sphere = adx_module_sphere();
    let dir = std::env::temp_dir().join(format!("adamsext-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = CString::new(dir.join("s.res").to_str().unwrap()).unwrap();
    unsafe {
        let mut r = ptr::null_mut();
        assert_eq!(adx_resolve(sphere, 4, 12, &mut r), AdxStatus::Ok);
        let mut d = 0;
        assert_eq!(adx_resolution_ext_dim(r, 1, 8, &mut d), AdxStatus::Ok);
        assert_eq!(d, 1);
        assert_eq!(adx_resolution_ext_dim(r, 9, 8, &mut d), AdxStatus::InvalidArgument);
        assert_eq!(adx_resolution_save(r, path.as_ptr()), AdxStatus::Ok);

        let mut back = ptr::null_mut();
        assert_eq!(adx_resolution_load(path.as_ptr(), &mut back), AdxStatus::Ok);
        for (s, t) in [(0, 0), (1, 1), (1, 2), (2, 4), (3, 3), (3, 9)] {
            let (mut a, mut b) = (0, 0);
            adx_resolution_ext_dim(r, s, t, &mut a);
            adx_resolution_ext_dim(back, s, t, &mut b);
            assert_eq!(a, b, "({s}, {t})");
        }
        adx_resolution_free(back);
        adx_resolution_free(r);
        adx_module_free(sphere);
    }
    std::fs::write(dir.join("bad.res"), "adamsext-resolution 1\nsha256 00\n").unwrap();
    let bad = CString::new(dir.join("bad.res").to_str().unwrap()).unwrap();
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { adx_resolution_load(bad.as_ptr(), &mut r) }, AdxStatus::Parse);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn header_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/adamsext.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["adx_module_parse", "adx_chart_build", "adx_chart_render", "adx_resolve", "ADX_STATUS_CROSS_CHECK"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let Ok(cc) = which_cc() else { return };
    let dir = std::env::temp_dir().join(format!("adamsext-h-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let main = dir.join("main.c");
    std::fs::write(
        &main,
        "#include \"adamsext.h\"\nint main(void) {\n  AdxModule *m = adx_module_sphere();\n  \
         size_t n = 0;\n  AdxStatus st = adx_module_violations(m, &n);\n  adx_module_free(m);\n  \
         return st == ADX_STATUS_OK && n == 0 ? 0 : 1;\n}\n",
    )
    .unwrap();
    let status = Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(header.parent().unwrap())
        .arg(&main)
        .status()
        .unwrap();
    std::fs::remove_dir_all(dir).unwrap();
    assert!(status.success());
}

fn which_cc() -> Result<&'static str, ()> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok_and(|o| o.status.success()))
        .ok_or(())
}
