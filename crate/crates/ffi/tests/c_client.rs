//! Compiles a small C program against the generated header and the static
//! library, then runs it.

use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "effhedge.h"

int main(void) {
    EhModel *model = NULL;
    if (eh_model_standard(0.08, 0.2, 100.0, 100.0, 1.0, &model) != EH_STATUS_OK) return 1;
    double price = 0.0;
    if (eh_perfect_hedge_price(model, 0.0, 100.0, &price) != EH_STATUS_OK) return 2;
    EhPlan *plan = NULL;
    if (eh_calibrate_power(model, 2.0, 0.8 * price, &plan) != EH_STATUS_OK) return 3;
    double value = 0.0, delta = 0.0;
    if (eh_plan_value_and_delta(plan, 0.0, 100.0, &value, &delta) != EH_STATUS_OK) return 4;
    if (fabs(value - 0.8 * price) > 1e-9) return 5;
    EhModel *bad = NULL;
    if (eh_model_standard(0.08, 0.2, -1.0, 100.0, 1.0, &bad) != EH_STATUS_VALIDATION) return 6;
    printf("%.12f %s\n", price, eh_last_error_message());
    eh_plan_free(plan);
    eh_model_free(model);
    return 0;
}
"#;

fn include_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include")
}

/// `cargo test` builds only the rlib, so build the static library into a
/// private target directory.
fn build_staticlib() -> PathBuf {
    let target = Path::new(env!("CARGO_TARGET_TMPDIR")).join("staticlib");
    let cargo = std::env::var("CARGO").unwrap_or_else(|_| "cargo".into());
    let status = Command::new(cargo)
        .args([
            "build",
            "--quiet",
            "-p",
            "effhedge-ffi",
            "--lib",
            "--target-dir",
        ])
        .arg(&target)
        .status()
        .unwrap();
    assert!(status.success());
    target.join("debug").join("libeffhedge_ffi.a")
}

#[test]
fn header_parses_as_c_and_cpp() {
    for (compiler, lang) in [("cc", "c"), ("c++", "c++")] {
        let status = Command::new(compiler)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang])
            .arg(include_dir().join("effhedge.h"))
            .status()
            .expect("compiler not found");
        assert!(status.success(), "{compiler}");
    }
}

#[test]
fn c_program_links_and_runs() {
    let include = include_dir();
    let lib = build_staticlib();
    let work = Path::new(env!("CARGO_TARGET_TMPDIR")).join("c_client");
    std::fs::create_dir_all(&work).unwrap();
    let source = work.join("main.c");
    let binary = work.join("main");
    std::fs::write(&source, PROGRAM).unwrap();

    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-I"])
        .arg(&include)
        .arg(&source)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&binary)
        .status()
        .expect("C compiler not found");
    assert!(status.success());

    let out = Command::new(&binary).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("7.965567455406 "), "{stdout}");
    assert!(stdout.contains("spot"), "{stdout}");
}
