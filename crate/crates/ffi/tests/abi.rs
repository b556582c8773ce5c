use std::ffi::{CStr, CString};
use std::ptr;

use tbdag_ffi::*;

fn last_error() -> String {
    let p = tb_last_error_message();
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string();
    unsafe { tb_string_free(p) };
    s
}

fn preset(name: &str) -> *mut TbGame {
    let c = CString::new(name).unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { tb_game_from_preset(c.as_ptr(), &mut g) }, TbStatus::Ok);
    g
}

#[test]
fn version_is_crate_version() {
    let v = unsafe { CStr::from_ptr(tb_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn solve_fig2_through_the_abi() {
    let g = preset("fig2");
    assert_eq!(unsafe { tb_game_num_nodes(g) }, 23);
    let mut cfg = tb_solve_config_default();
    cfg.eps = 1e-3;
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { tb_solve(g, &cfg, &mut r) }, TbStatus::Ok);
    unsafe {
        assert_eq!(tb_result_converged(r), 1);
        assert!(tb_result_value(r).abs() <= 1e-3);
        assert!(tb_result_gap(r) <= 1e-3);
        let n = tb_game_num_terminals(g);
        let mut buf = vec![0.0; n];
        assert_eq!(tb_result_realization(r, TbSide::Max, buf.as_mut_ptr(), n), TbStatus::Ok);
        assert!(buf.iter().all(|&p| (-1e-12..=1.0 + 1e-12).contains(&p)));
        assert_eq!(tb_result_realization(r, TbSide::Min, buf.as_mut_ptr(), n - 1), TbStatus::BufferTooSmall);
        let mut s = ptr::null_mut();
        assert_eq!(tb_result_to_json(r, &mut s), TbStatus::Ok);
        let doc: serde_json::Value = serde_json::from_str(CStr::from_ptr(s).to_str().unwrap()).unwrap();
        assert_eq!(doc["converged"], true);
        tb_string_free(s);
        tb_result_free(r);
        tb_game_free(g);
    }
}

#[test]
fn json_round_trip_and_build_stats() {
    let g = preset("2K3");
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { tb_game_to_json(g, &mut s) }, TbStatus::Ok);
    let mut g2 = ptr::null_mut();
    assert_eq!(unsafe { tb_game_from_json(s, &mut g2) }, TbStatus::Ok);
    unsafe { tb_string_free(s) };
    let mut st = TbDagStats::default();
    assert_eq!(unsafe { tb_build_stats(g2, TbSide::Max, TbSplit::Observation, 1, 1_000_000, &mut st) }, TbStatus::Ok);
    // Perfect recall: one decision point per infoset plus the root.
    assert_eq!(st.decision_points, 7);
    assert_eq!(st.k, 1);
    unsafe {
        tb_game_free(g);
        tb_game_free(g2);
    }
}

#[test]
fn errors_map_to_status_codes() {
    let mut g = ptr::null_mut();
    let bad = CString::new("{not json").unwrap();
    assert_eq!(unsafe { tb_game_from_json(bad.as_ptr(), &mut g) }, TbStatus::Malformed);
    assert!(last_error().contains("malformed"));
    let name = CString::new("no-such-game").unwrap();
    assert_eq!(unsafe { tb_game_from_preset(name.as_ptr(), &mut g) }, TbStatus::InvalidParams);
    assert_eq!(unsafe { tb_game_from_preset(ptr::null(), &mut g) }, TbStatus::NullPointer);
    assert!(g.is_null());

    let fig9 = preset("fig9-C16");
    let mut st = TbDagStats::default();
    assert_eq!(unsafe { tb_build_stats(fig9, TbSide::Max, TbSplit::Public, 1, 1000, &mut st) }, TbStatus::Budget);
    assert!(last_error().contains("budget"));

    let mut cfg = tb_solve_config_default();
    cfg.eps = -1.0;
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { tb_solve(fig9, &cfg, &mut r) }, TbStatus::InvalidParams);
    assert!(r.is_null());
    unsafe {
        tb_game_free(fig9);
        tb_game_free(ptr::null_mut());
        tb_result_free(ptr::null_mut());
        assert!(tb_result_value(ptr::null()).is_nan());
    }
}

#[test]
fn header_declares_the_api() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/tbdag.h")).unwrap();
    for name in [
        "tb_game_from_json",
        "tb_game_from_preset",
        "tb_solve",
        "tb_result_realization",
        "tb_last_error_message",
        "tb_string_free",
        "TB_STATUS_BUDGET",
        "typedef struct TbGame TbGame",
    ] {
        assert!(h.contains(name), "header lacks {name}");
    }
}

/// Compiles the C example against the generated header and the static
/// library, then runs it. Skipped when no C compiler is on PATH.
#[test]
fn c_program_links_and_runs() {
    use std::path::PathBuf;
    use std::process::Command;
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("cc not found; skipping");
        return;
    }
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // The test harness only links the rlib, so build the static library in
    // a separate target directory to avoid waiting on the outer build lock.
    let exe = std::env::current_exe().unwrap();
    let target = exe.ancestors().nth(3).unwrap().join("c-abi");
    let built = Command::new(env!("CARGO"))
        .args(["build", "--quiet", "--lib", "-p", "tbdag-ffi", "--target-dir"])
        .arg(&target)
        .current_dir(&manifest)
        .status()
        .unwrap();
    assert!(built.success(), "building the static library failed");
    let lib = target.join("debug/libtbdag_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let out = std::env::temp_dir().join(format!("tbdag_smoke_{}", std::process::id()));
    let status = Command::new("cc")
        .arg(manifest.join("examples/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let run = Command::new(&out).output().unwrap();
    let _ = std::fs::remove_file(&out);
    assert!(run.status.success(), "C program failed: {}", String::from_utf8_lossy(&run.stdout));
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("value "));
}
