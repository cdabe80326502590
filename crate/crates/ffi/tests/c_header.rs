//! Compiles and runs a small C program against the generated header and the
//! static library. Skipped when no C compiler is on the path.

use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "abelrd.h"

int main(void) {
    AbelrdGroup *g = NULL;
    if (abelrd_group_parse("Z2^3", &g) != ABELRD_STATUS_OK) return 10;
    uint64_t order = 0;
    if (abelrd_group_order(g, &order) != ABELRD_STATUS_OK || order != 8) return 11;
    abelrd_group_free(g);

    if (abelrd_group_parse("Z1x", &g) != ABELRD_STATUS_INVALID_ARGUMENT) return 12;
    if (abelrd_last_error() == NULL) return 13;

    double table[4] = {0.25, 0.25, 0.25, 0.25};
    size_t shape[2] = {2, 2};
    size_t axes[2] = {0, 1};
    AbelrdPmf *pmf = NULL;
    double h = 0;
    if (abelrd_pmf_new(table, 4, shape, 2, &pmf) != ABELRD_STATUS_OK) return 14;
    if (abelrd_pmf_entropy(pmf, axes, 2, &h) != ABELRD_STATUS_OK || h < 1.999999 || h > 2.000001) return 15;
    abelrd_pmf_free(pmf);
    printf("ok %s\n", abelrd_version());
    return 0;
}
"#;

fn target_dir() -> PathBuf {
    // tests/ binaries live in <target>/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

fn have(cmd: &str) -> bool {
    Command::new(cmd).arg("--version").output().is_ok()
}

#[test]
fn c_program_links_and_runs() {
    if !have("cc") {
        eprintln!("no C compiler; skipped");
        return;
    }
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let lib = target_dir().join("libabelrd_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    let exe = dir.path().join("smoke");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-o"])
        .arg(&exe)
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "C program exited with {:?}", out.status.code());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}
