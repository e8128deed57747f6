//! Compiles a small C program against the generated header and links it
//! with the static library.

use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "entropy_forge.h"

int main(void) {
    uint16_t symbols[256];
    for (int i = 0; i < 256; i++) symbols[i] = (uint16_t)i;
    EfStream *s = NULL;
    if (ef_stream_from_symbols(8, symbols, 256, &s) != EF_STATUS_OK) return 10;
    double h = 0.0;
    if (ef_shannon_entropy(s, &h) != EF_STATUS_OK) return 11;
    if (h < 7.999 || h > 8.001) return 12;
    ef_stream_free(s);

    uint16_t bad = 999;
    EfStatus st = ef_stream_from_symbols(8, &bad, 1, &s);
    if (st != EF_STATUS_PARAMETER) return 13;
    if (ef_last_error_message() == NULL) return 14;
    printf("%s\n", ef_version());
    return 0;
}
"#;

fn target_dir() -> PathBuf {
    // tests run from target/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

fn compiler() -> Option<String> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok())
        .map(String::from)
}

#[test]
fn header_compiles_and_links() {
    let Some(cc) = compiler() else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    assert!(include.join("entropy_forge.h").exists());
    let lib = target_dir().join("libentropy_forge_ffi.a");
    if !lib.exists() {
        let status = Command::new(env!("CARGO"))
            .args(["build", "-p", "entropy-forge-ffi", "--lib"])
            .status()
            .unwrap();
        assert!(status.success());
    }
    assert!(lib.exists(), "{} missing", lib.display());

    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(&src, PROGRAM).unwrap();
    let exe = dir.path().join("main");
    let out = Command::new(&cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .arg("-o")
        .arg(&exe)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    assert_eq!(
        String::from_utf8_lossy(&run.stdout).trim(),
        env!("CARGO_PKG_VERSION")
    );
}
