//! The generated header declares every exported function and is usable from C.

use std::path::{Path, PathBuf};
use std::process::Command;

const EXPORTED: &[&str] = &[
    "okd_last_error",
    "okd_status_message",
    "okd_config_new",
    "okd_config_free",
    "okd_config_set_tolerances",
    "okd_config_set_truncation",
    "okd_config_set_max_evaluations",
    "okd_config_set_search",
    "okd_config_set_modulation",
    "okd_config_clear_modulation",
    "okd_key_rate",
    "okd_optimal_rate",
    "okd_eavesdropper_advantage",
    "okd_shot_noise_advantage",
    "okd_helstrom_error_probability",
    "okd_coherent_mixture_entropy",
    "okd_gamma_constant",
    "okd_chi_constant",
    "okd_sweep_run",
    "okd_sweep_len",
    "okd_sweep_row",
    "okd_sweep_row_error",
    "okd_sweep_free",
    "okd_simulate_key_rate",
];

fn manifest_dir() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

fn header() -> String {
    std::fs::read_to_string(manifest_dir().join("include/okd.h")).expect("header generated by build.rs")
}

#[test]
fn header_declares_all_exports() {
    let h = header();
    for name in EXPORTED {
        assert!(h.contains(&format!("{name}(")), "{name} missing from okd.h");
    }
    let source = std::fs::read_to_string(manifest_dir().join("src/lib.rs")).unwrap();
    assert_eq!(source.matches("#[no_mangle]").count(), EXPORTED.len());
    for ty in ["typedef struct OkdConfig OkdConfig;", "typedef struct OkdSweep OkdSweep;", "OKD_STATUS_OK = 0"] {
        assert!(h.contains(ty), "{ty} missing from okd.h");
    }
}

/// Directory holding the library artifacts of the current profile.
fn artifact_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    // target/<profile>/deps/<test binary>
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

fn have_cc() -> bool {
    Command::new("cc").arg("--version").output().is_ok_and(|o| o.status.success())
}

#[test]
fn c_program_links_against_static_library() {
    let lib = artifact_dir().join("libokd_ffi.a");
    if !have_cc() || !lib.exists() {
        eprintln!("skipping: C compiler or {} unavailable", lib.display());
        return;
    }
    let out = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("okd_smoke");
    let status = Command::new("cc")
        .args(["-std=c11", "-Wall", "-Werror", "-I"])
        .arg(manifest_dir().join("include"))
        .arg(manifest_dir().join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .expect("run cc");
    assert!(status.success(), "C smoke program failed to build");
    let run = Command::new(&out).output().expect("run smoke program");
    assert!(
        run.status.success(),
        "smoke program failed: {}",
        String::from_utf8_lossy(&run.stderr)
    );
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "ok");
}
