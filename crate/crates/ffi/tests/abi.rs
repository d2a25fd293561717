use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use thurston_ffi::*;

const FULL_2_SHIFT: &str = r#"{
  "states": ["0", "1"],
  "edges": [["0", "0"], ["0", "1"], ["1", "0"], ["1", "1"]],
  "potentials": {
    "r": [1.0, 2.0, 0.5, 1.5],
    "r3": [3.0, 6.0, 1.5, 4.5],
    "unit": [1.0, 1.0, 1.0, 1.0],
    "signed": [1.0, -1.0, 0.0, 2.0]
  }
}"#;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe {
        let needed = thurston_last_error(ptr::null_mut(), 0);
        let mut buf = vec![0 as c_char; needed];
        thurston_last_error(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

struct Graph(*mut ThurstonGraph);

impl Graph {
    fn parse(json: &str) -> Graph {
        let mut g = ptr::null_mut();
        let status = unsafe { thurston_graph_from_json(c(json).as_ptr(), &mut g) };
        assert_eq!(status, ThurstonStatus::Ok, "{}", last_error());
        Graph(g)
    }
}

impl Drop for Graph {
    fn drop(&mut self) {
        unsafe { thurston_graph_free(self.0) }
    }
}

struct Rep(*mut ThurstonRep);

impl Drop for Rep {
    fn drop(&mut self) {
        unsafe { thurston_rep_free(self.0) }
    }
}

fn rep_from(rank: usize, dim: usize, entries: &[f64]) -> Rep {
    let mut r = ptr::null_mut();
    let status = unsafe { thurston_rep_new(rank, dim, entries.as_ptr(), &mut r) };
    assert_eq!(status, ThurstonStatus::Ok, "{}", last_error());
    Rep(r)
}

fn jordan(rep: &Rep, word: &str, dim: usize) -> Vec<f64> {
    let mut out = vec![f64::NAN; dim];
    let status = unsafe { thurston_rep_jordan(rep.0, c(word).as_ptr(), out.as_mut_ptr(), dim) };
    assert_eq!(status, ThurstonStatus::Ok, "{}", last_error());
    out
}

#[test]
fn version_is_the_package_version() {
    let v = unsafe { CStr::from_ptr(thurston_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn graph_shape_and_pressure() {
    let g = Graph::parse(FULL_2_SHIFT);
    let (mut states, mut edges) = (0usize, 0usize);
    assert_eq!(
        unsafe { thurston_graph_size(g.0, &mut states, &mut edges) },
        ThurstonStatus::Ok
    );
    assert_eq!((states, edges), (2, 4));

    let mut p = f64::NAN;
    assert_eq!(
        unsafe { thurston_graph_pressure(g.0, ptr::null(), &mut p) },
        ThurstonStatus::Ok
    );
    assert!((p - 2f64.ln()).abs() < 1e-12);

    // P(c) = log 2 + c for a constant potential.
    assert_eq!(
        unsafe { thurston_graph_pressure(g.0, c("unit").as_ptr(), &mut p) },
        ThurstonStatus::Ok
    );
    assert!((p - 2f64.ln() - 1.0).abs() < 1e-12);
}

#[test]
fn flow_entropy_distance_and_ratio() {
    let g = Graph::parse(FULL_2_SHIFT);
    let mut h = f64::NAN;
    assert_eq!(
        unsafe { thurston_flow_entropy(g.0, c("unit").as_ptr(), &mut h) },
        ThurstonStatus::Ok
    );
    assert!((h - 2f64.ln()).abs() < 1e-10);

    let mut h1 = f64::NAN;
    let mut h3 = f64::NAN;
    unsafe {
        thurston_flow_entropy(g.0, c("r").as_ptr(), &mut h1);
        thurston_flow_entropy(g.0, c("r3").as_ptr(), &mut h3);
    }
    assert!((h1 - 3.0 * h3).abs() < 1e-9);

    let mut d = f64::NAN;
    assert_eq!(
        unsafe { thurston_flow_dth(g.0, c("r").as_ptr(), c("r3").as_ptr(), &mut d) },
        ThurstonStatus::Ok
    );
    assert!(d.abs() < 1e-9);

    // Cycle ratios of `signed` over `unit`: the loop at 1 has mean 2.
    let mut m = f64::NAN;
    assert_eq!(
        unsafe { thurston_max_cycle_ratio(g.0, c("signed").as_ptr(), c("unit").as_ptr(), &mut m) },
        ThurstonStatus::Ok
    );
    assert!((m - 2.0).abs() < 1e-12);
}

#[test]
fn errors_carry_status_and_message() {
    let mut g = ptr::null_mut();
    let status = unsafe { thurston_graph_from_json(c("{ not json").as_ptr(), &mut g) };
    assert_eq!(status, ThurstonStatus::Parse);
    assert!(g.is_null());
    assert!(!last_error().is_empty());

    let status = unsafe { thurston_graph_from_json(ptr::null(), &mut g) };
    assert_eq!(status, ThurstonStatus::NullPointer);
    assert!(last_error().contains("json"));

    let graph = Graph::parse(FULL_2_SHIFT);
    let mut h = 7.0;
    let status = unsafe { thurston_flow_entropy(graph.0, c("missing").as_ptr(), &mut h) };
    assert_eq!(status, ThurstonStatus::Parse);
    assert_eq!(h, 7.0, "output must be untouched on failure");

    // `signed` is not a valid roof.
    let status = unsafe { thurston_flow_entropy(graph.0, c("signed").as_ptr(), &mut h) };
    assert_eq!(status, ThurstonStatus::Domain);

    let status = unsafe { thurston_graph_pressure(ptr::null(), ptr::null(), &mut h) };
    assert_eq!(status, ThurstonStatus::NullPointer);

    // A successful call clears the message.
    unsafe { thurston_graph_pressure(graph.0, ptr::null(), &mut h) };
    assert_eq!(last_error(), "");
}

#[test]
fn last_error_truncates_and_reports_full_size() {
    let mut g = ptr::null_mut();
    unsafe { thurston_graph_from_json(ptr::null(), &mut g) };
    let full = last_error();
    let mut small = [1 as c_char; 5];
    let needed = unsafe { thurston_last_error(small.as_mut_ptr(), small.len()) };
    assert_eq!(needed, full.len() + 1);
    let got = unsafe { CStr::from_ptr(small.as_ptr()) }.to_str().unwrap();
    assert_eq!(got, &full[..4]);
}

#[test]
fn rep_jordan_of_diagonal_generators() {
    let rep = rep_from(2, 2, &[2.0, 0.0, 0.0, 0.5, 1.0, 1.0, 0.0, 1.0]);
    let (mut rank, mut dim) = (0usize, 0usize);
    assert_eq!(
        unsafe { thurston_rep_shape(rep.0, &mut rank, &mut dim) },
        ThurstonStatus::Ok
    );
    assert_eq!((rank, dim), (2, 2));
    let l = jordan(&rep, "a", 2);
    assert!((l[0] - 2f64.ln()).abs() < 1e-14 && (l[1] + 2f64.ln()).abs() < 1e-14);
    let l = jordan(&rep, "aaA", 2);
    assert!((l[0] - 2f64.ln()).abs() < 1e-14);

    let mut short = [0.0; 1];
    let status =
        unsafe { thurston_rep_jordan(rep.0, c("a").as_ptr(), short.as_mut_ptr(), short.len()) };
    assert_eq!(status, ThurstonStatus::BufferTooSmall);

    let mut out = [0.0; 2];
    let status = unsafe { thurston_rep_jordan(rep.0, c("a1").as_ptr(), out.as_mut_ptr(), 2) };
    assert_eq!(status, ThurstonStatus::Parse);
    // `c` names a third generator.
    let status = unsafe { thurston_rep_jordan(rep.0, c("ac").as_ptr(), out.as_mut_ptr(), 2) };
    assert_eq!(status, ThurstonStatus::Domain);
}

#[test]
fn singular_generator_is_a_domain_error() {
    let mut r = ptr::null_mut();
    let entries = [1.0, 1.0, 1.0, 1.0, 2.0, 0.0, 0.0, 0.5];
    let status = unsafe { thurston_rep_new(2, 2, entries.as_ptr(), &mut r) };
    assert_eq!(status, ThurstonStatus::Domain);
    assert!(r.is_null());
    let status = unsafe { thurston_rep_new(0, 2, entries.as_ptr(), &mut r) };
    assert_eq!(status, ThurstonStatus::InvalidArgument);
}

#[test]
fn schottky_sym_power_and_distance() {
    let mut base = ptr::null_mut();
    let status = unsafe { thurston_rep_schottky(2.0, 2.5, std::f64::consts::FRAC_PI_4, &mut base) };
    assert_eq!(status, ThurstonStatus::Ok, "{}", last_error());
    let base = Rep(base);
    let mut lifted = ptr::null_mut();
    assert_eq!(
        unsafe { thurston_rep_sym_power(base.0, 4, &mut lifted) },
        ThurstonStatus::Ok
    );
    let lifted = Rep(lifted);

    let l1 = jordan(&base, "abAB", 2)[0];
    let l = jordan(&lifted, "abAB", 4);
    for (i, x) in l.iter().enumerate() {
        assert!((x - (3.0 - 2.0 * i as f64) * l1).abs() < 1e-9);
    }

    let mut len = f64::NAN;
    assert_eq!(
        unsafe { thurston_rep_length(base.0, c("hilbert").as_ptr(), c("abAB").as_ptr(), &mut len) },
        ThurstonStatus::Ok
    );
    assert!((len - 2.0 * l1).abs() < 1e-12);

    let mut d = f64::NAN;
    assert_eq!(
        unsafe { thurston_rep_dth(base.0, base.0, c("lambda1").as_ptr(), 11, &mut d) },
        ThurstonStatus::Ok,
        "{}",
        last_error()
    );
    assert!(d.abs() < 1e-12);

    // Overlapping ping-pong intervals.
    let mut bad = ptr::null_mut();
    let status = unsafe { thurston_rep_schottky(0.5, 0.5, 0.1, &mut bad) };
    assert_eq!(status, ThurstonStatus::Domain);
}

#[test]
fn entropy_of_schottky_rep_is_positive() {
    let mut r = ptr::null_mut();
    unsafe { thurston_rep_schottky(2.0, 2.5, std::f64::consts::FRAC_PI_4, &mut r) };
    let r = Rep(r);
    let (mut h, mut se) = (f64::NAN, f64::NAN);
    let status =
        unsafe { thurston_rep_entropy(r.0, c("two_lambda1").as_ptr(), 10, &mut h, &mut se) };
    assert_eq!(status, ThurstonStatus::Ok, "{}", last_error());
    assert!(h > 0.0 && h < 2f64.ln() * 3.0 && se >= 0.0);
    let status =
        unsafe { thurston_rep_entropy(r.0, c("two_lambda1").as_ptr(), 2, &mut h, ptr::null_mut()) };
    assert_eq!(status, ThurstonStatus::Domain);
}

fn compiler(name: &str) -> bool {
    Command::new(name)
        .arg("--version")
        .output()
        .is_ok_and(|o| o.status.success())
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("include")
        .join("thurston.h");
    let text = std::fs::read_to_string(&header).expect("header is generated by the build");
    for name in [
        "thurston_graph_from_json",
        "thurston_rep_jordan",
        "thurston_last_error",
        "THURSTON_STATUS_BUFFER_TOO_SMALL",
    ] {
        assert!(text.contains(name), "header lacks {name}");
    }
    for (cc, lang) in [("cc", "c"), ("c++", "c++")] {
        if !compiler(cc) {
            eprintln!("{cc} not found, skipping {lang} syntax check");
            continue;
        }
        let out = Command::new(cc)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang])
            .arg(&header)
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "{lang}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}
