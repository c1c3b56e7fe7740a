//! Acceptance gate for the batch runner: determinism of the JSON report.

use std::fs;
use std::path::PathBuf;
use std::process::Command;

#[test]
fn criterion_11_report_determinism() {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance_determinism");
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.json");
    fs::write(
        &cfg,
        r#"{
          "curvature": 1,
          "kind": "SERRIN",
          "n": 2,
          "cone": {"theta_lo": 0.0, "theta_hi": 1.0471975511965976, "side": "INTERIOR"},
          "graph": {"type": "CONSTANT", "R": 0.8},
          "resolutions": [[12, 12], [24, 24], [48, 48]],
          "radial": {"enabled": true, "n_list": [2], "m_list": [128]}
        }"#,
    )
    .unwrap();

    let mut reports = Vec::new();
    for sub in ["a", "b"] {
        let out = Command::new(env!("CARGO_BIN_EXE_conecap"))
            .args(["verify", "--config"])
            .arg(&cfg)
            .arg("--output")
            .arg(dir.join(sub))
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "verify failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let raw = fs::read_to_string(dir.join(sub).join("report.json")).unwrap();
        // drop the isolated metadata block, byte-compare the rest
        let mut v: serde_json::Value = serde_json::from_str(&raw).unwrap();
        v.as_object_mut().unwrap().remove("metadata");
        reports.push(serde_json::to_string_pretty(&v).unwrap());
    }
    let pass = reports[0] == reports[1];
    println!(
        "acceptance 11 [byte-identical reports, metadata excluded]: {} | {} bytes compared",
        if pass { "PASS" } else { "FAIL" },
        reports[0].len()
    );
    assert!(pass, "identical configs produced different reports");
}
