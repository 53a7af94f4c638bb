use std::ffi::{c_char, CStr, CString};
use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::ptr;

use bilsym_ffi::*;

fn last_error() -> String {
    let mut buf = [0 as c_char; 256];
    unsafe {
        bs_last_error(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

fn grid(n: usize) -> *mut BsGrid {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { bs_grid_new(1, n, 2.0 * PI, &mut g) }, BsStatus::Ok);
    g
}

fn field(g: *const BsGrid, re: &[f64], im: Option<&[f64]>) -> *mut BsField {
    let mut f = ptr::null_mut();
    let im = im.map_or(ptr::null(), |v| v.as_ptr());
    assert_eq!(unsafe { bs_field_from_samples(g, re.as_ptr(), im, re.len(), &mut f) }, BsStatus::Ok);
    f
}

fn symbol(label: &str) -> Result<*mut BsSymbol, BsStatus> {
    let c = CString::new(label).unwrap();
    let mut s = ptr::null_mut();
    match unsafe { bs_symbol_builtin(c.as_ptr(), 1, &mut s) } {
        BsStatus::Ok => Ok(s),
        e => Err(e),
    }
}

#[test]
fn grid_lifecycle_and_errors() {
    let g = grid(16);
    assert_eq!(unsafe { bs_grid_len(g) }, 16);
    unsafe { bs_grid_free(g) };
    unsafe { bs_grid_free(ptr::null_mut()) };

    let mut bad = ptr::null_mut();
    assert_eq!(unsafe { bs_grid_new(1, 15, 1.0, &mut bad) }, BsStatus::InvalidGrid);
    assert!(bad.is_null());
    assert!(last_error().starts_with("invalid grid"));
    assert_eq!(unsafe { bs_grid_new(1, 16, 1.0, ptr::null_mut()) }, BsStatus::NullPointer);
    assert_eq!(unsafe { bs_grid_len(ptr::null()) }, 0);
}

#[test]
fn field_round_trip_and_norm() {
    let g = grid(8);
    let re: Vec<f64> = (0..8).map(|i| i as f64 - 3.5).collect();
    let im: Vec<f64> = (0..8).map(|i| 0.25 * i as f64).collect();
    let f = field(g, &re, Some(&im));
    assert_eq!(unsafe { bs_field_len(f) }, 8);
    let (mut a, mut b) = (vec![0.0; 8], vec![0.0; 8]);
    assert_eq!(unsafe { bs_field_values(f, a.as_mut_ptr(), b.as_mut_ptr(), 8) }, BsStatus::Ok);
    assert_eq!((a, b), (re.clone(), im.clone()));
    let mut short = vec![0.0; 4];
    assert_eq!(unsafe { bs_field_values(f, short.as_mut_ptr(), ptr::null_mut(), 4) }, BsStatus::BufferTooSmall);

    let mut norm = 0.0;
    assert_eq!(unsafe { bs_lp_norm(f, f64::INFINITY, &mut norm) }, BsStatus::Ok);
    let want = re.iter().zip(&im).map(|(x, y)| f64::hypot(*x, *y)).fold(0.0, f64::max);
    assert_eq!(norm, want);
    assert_eq!(unsafe { bs_lp_norm(f, 2.0, &mut norm) }, BsStatus::Ok);
    let h = 2.0 * PI / 8.0;
    let want = (h * re.iter().zip(&im).map(|(x, y)| x * x + y * y).sum::<f64>()).sqrt();
    assert!((norm - want).abs() < 1e-13 * want);
    assert_eq!(unsafe { bs_lp_norm(f, 0.0, &mut norm) }, BsStatus::Precondition);

    let mut wrong = ptr::null_mut();
    assert_eq!(
        unsafe { bs_field_from_samples(g, re.as_ptr(), ptr::null(), 5, &mut wrong) },
        BsStatus::InvalidArgument
    );
    assert_eq!(
        unsafe { bs_field_from_samples(g, ptr::null(), ptr::null(), 8, &mut wrong) },
        BsStatus::NullPointer
    );
    unsafe {
        bs_field_free(f);
        bs_grid_free(g);
    }
}

#[test]
fn apply_constant_symbol_is_product() {
    let g = grid(16);
    let xs: Vec<f64> = (0..16).map(|i| 2.0 * PI * i as f64 / 16.0).collect();
    let a: Vec<f64> = xs.iter().map(|x| x.cos() + 0.5).collect();
    let b: Vec<f64> = xs.iter().map(|x| (2.0 * x).sin()).collect();
    let (f, h) = (field(g, &a, None), field(g, &b, None));
    let one = symbol("one").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { bs_apply_fft_diag(one, f, h, &mut out) }, BsStatus::Ok);
    let (mut re, mut im) = (vec![0.0; 16], vec![0.0; 16]);
    assert_eq!(unsafe { bs_field_values(out, re.as_mut_ptr(), im.as_mut_ptr(), 16) }, BsStatus::Ok);
    for i in 0..16 {
        assert!((re[i] - a[i] * b[i]).abs() < 1e-13 && im[i].abs() < 1e-13);
    }

    let g2 = grid(32);
    let k = field(g2, &[1.0; 32], None);
    let mut bad = ptr::null_mut();
    assert_eq!(unsafe { bs_apply_fft_diag(one, f, k, &mut bad) }, BsStatus::GridMismatch);
    assert_eq!(unsafe { bs_apply_fft_diag(ptr::null(), f, h, &mut bad) }, BsStatus::NullPointer);
    unsafe {
        for p in [f, h, k, out] {
            bs_field_free(p);
        }
        bs_symbol_free(one);
        bs_grid_free(g);
        bs_grid_free(g2);
    }
}

#[test]
fn symbol_labels() {
    let s = symbol("bracket(-1)").unwrap();
    unsafe { bs_symbol_free(s) };
    assert_eq!(symbol("brakket(-1)").unwrap_err(), BsStatus::UnknownSymbol);
    assert!(last_error().contains("brakket"));
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { bs_symbol_builtin(ptr::null(), 1, &mut out) }, BsStatus::NullPointer);
}

#[test]
fn critical_order_values() {
    let mut m = 0.0;
    assert_eq!(unsafe { bs_critical_order(2.0, 2.0, 0.0, 1, &mut m) }, BsStatus::Ok);
    assert_eq!(m, -0.5);
    assert_eq!(unsafe { bs_critical_order(1.0, 1.0, 0.5, 2, &mut m) }, BsStatus::Ok);
    assert_eq!(m, -2.0);
    assert_eq!(unsafe { bs_critical_order(f64::INFINITY, 1.0, 0.0, 1, &mut m) }, BsStatus::Ok);
    assert_eq!(m, -1.0);
    assert_eq!(unsafe { bs_critical_order(0.5, 2.0, 0.0, 1, &mut m) }, BsStatus::Precondition);
    assert_eq!(unsafe { bs_critical_order(2.0, 2.0, 1.5, 1, &mut m) }, BsStatus::InvalidArgument);
}

#[test]
fn error_message_truncates() {
    let mut g = ptr::null_mut();
    unsafe { bs_grid_new(7, 16, 1.0, &mut g) };
    let full = unsafe { bs_last_error(ptr::null_mut(), 0) };
    let mut buf = [1 as c_char; 6];
    assert_eq!(unsafe { bs_last_error(buf.as_mut_ptr(), buf.len()) }, full);
    assert_eq!(buf[5], 0);
    assert_eq!(unsafe { CStr::from_ptr(buf.as_ptr()) }.to_bytes(), b"inval");
}

#[test]
fn header_declares_the_api_and_compiles() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(dir.join("include/bilsym.h")).unwrap();
    for name in [
        "bs_grid_new", "bs_grid_free", "bs_field_from_samples", "bs_field_values", "bs_field_free", "bs_lp_norm",
        "bs_symbol_builtin", "bs_symbol_free", "bs_apply_fft_diag", "bs_critical_order", "bs_last_error",
        "typedef struct BsGrid BsGrid", "BS_STATUS_OK = 0",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"bilsym.h\"\nint main(void) { BsGrid *g = 0; BsStatus s = bs_grid_new(1, 16, 1.0, &g); \
         bs_grid_free(g); return s == BS_STATUS_OK ? 0 : 1; }\n",
    )
    .unwrap();
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(dir.join("include"))
        .arg(&src)
        .status()
        .expect("a C compiler is needed to check the header");
    assert!(status.success());
}
