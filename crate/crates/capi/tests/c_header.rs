//! Validates the committed C header: it must stay in sync with the
//! exported symbols, parse as C, and drive the static library from a real
//! C program.

use std::path::PathBuf;
use std::process::Command;

fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

/// target/<profile> directory holding libvvckit_capi.a, derived from the
/// test executable's own location (target/<profile>/deps/...).
fn target_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn header_lists_every_exported_symbol() {
    let header = std::fs::read_to_string(manifest_dir().join("include/vvckit.h")).unwrap();
    let source = std::fs::read_to_string(manifest_dir().join("src/lib.rs")).unwrap();
    let mut exported = Vec::new();
    for chunk in source.split("extern \"C\" fn ").skip(1) {
        let name: String = chunk
            .chars()
            .take_while(|c| c.is_alphanumeric() || *c == '_')
            .collect();
        if !name.is_empty() {
            exported.push(name);
        }
    }
    assert!(exported.len() >= 12, "expected the full export list");
    for name in exported {
        assert!(
            header.contains(&name),
            "header is missing {name}; \
                 regenerate with `cargo build -p vvckit-capi --features generate-header`"
        );
    }
}

const C_SMOKE: &str = r#"
#include <stdio.h>
#include <stdlib.h>
#include "vvckit.h"

int main(void) {
    VvcKitPlane *src = NULL, *dst = NULL;
    VvcKitRegistry *reg = NULL;
    if (vvckit_plane_new(64, 48, 8, &src) != VVC_KIT_STATUS_OK) return 10;
    if (vvckit_plane_fill_random(src, 7) != VVC_KIT_STATUS_OK) return 11;
    if (vvckit_plane_new(64, 48, 8, &dst) != VVC_KIT_STATUS_OK) return 12;
    if (vvckit_registry_new("auto", &reg) != VVC_KIT_STATUS_OK) return 13;

    uint16_t pred[16 * 16];
    if (vvckit_interp_luma(reg, src, 8, 8, 16, 16, 3, 12, false, pred, 256)
        != VVC_KIT_STATUS_OK) return 14;
    if (vvckit_alf_filter_plane(reg, src, dst, 5, 32) != VVC_KIT_STATUS_OK) return 15;
    if (vvckit_plane_hash(dst) == 0) return 16;

    int16_t levels[8 * 8] = {0};
    int16_t resid[8 * 8];
    levels[0] = 512;
    if (vvckit_inv_transform(reg, levels, 8, 8, 0, 0, 8, resid) != VVC_KIT_STATUS_OK)
        return 17;

    char *json = NULL;
    if (vvckit_bench_json(96, 64, 1, 8, 1, 32, 32, "alf", "auto", 1, &json)
        != VVC_KIT_STATUS_OK) return 18;
    if (!json || json[0] != '{') return 19;
    vvckit_string_free(json);

    if (vvckit_verify(3, 5) != 0) return 20;

    printf("version %s\n", vvckit_version());
    vvckit_plane_free(src);
    vvckit_plane_free(dst);
    vvckit_registry_free(reg);
    return 0;
}
"#;

#[test]
fn c_program_links_and_runs_against_the_static_library() {
    let dir = tempfile::tempdir().unwrap();
    let c_path = dir.path().join("smoke.c");
    let bin_path = dir.path().join("smoke");
    std::fs::write(&c_path, C_SMOKE).unwrap();

    let lib = target_dir().join("libvvckit_capi.a");
    assert!(
        lib.exists(),
        "static library not found at {}",
        lib.display()
    );

    let compile = Command::new("cc")
        .arg(&c_path)
        .arg("-I")
        .arg(manifest_dir().join("include"))
        .arg(lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin_path)
        .output()
        .expect("cc must be available");
    assert!(
        compile.status.success(),
        "compilation failed:\n{}",
        String::from_utf8_lossy(&compile.stderr)
    );

    let run = Command::new(&bin_path).output().unwrap();
    assert!(
        run.status.success(),
        "smoke binary exited {:?}: {}",
        run.status.code(),
        String::from_utf8_lossy(&run.stdout)
    );
    assert!(String::from_utf8_lossy(&run.stdout).contains("version"));
}
