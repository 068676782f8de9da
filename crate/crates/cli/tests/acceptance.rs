//! Criterion 13: the full quickcheck suite is byte-identical across two
//! runs with the same config, and the two runs together stay under the
//! 20-minute budget.

use std::path::Path;

use speclab_cli::config::RunConfig;
use speclab_cli::{execute, Overrides};

fn quickcheck_config() -> RunConfig {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs/harmonic-d2-quickcheck.toml");
    RunConfig::load(&path).expect("bundled quickcheck config parses")
}

/// Byte comparison with the wall-time line (the one timestamp-like field)
/// normalized away.
fn normalize(text: &str) -> String {
    text.lines()
        .filter(|l| !l.trim_start().starts_with("\"wall_time_s\""))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn criterion_13_determinism_and_budget() {
    let t0 = std::time::Instant::now();
    let cfg = quickcheck_config();
    let dir1 = tempfile::tempdir().unwrap();
    let dir2 = tempfile::tempdir().unwrap();
    let ov1 = Overrides {
        out_dir: Some(dir1.path().to_path_buf()),
        ..Default::default()
    };
    let ov2 = Overrides {
        out_dir: Some(dir2.path().to_path_buf()),
        ..Default::default()
    };
    let s1 = execute(&cfg, &[], &ov1).unwrap();
    let s2 = execute(&cfg, &[], &ov2).unwrap();
    assert!(s1.all_passed, "quickcheck suite has failing checks");
    assert!(s2.all_passed);

    let mut names: Vec<String> = std::fs::read_dir(dir1.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert!(
        names.iter().any(|n| n.ends_with(".json"))
            && names.iter().any(|n| n.ends_with(".csv"))
            && names.iter().any(|n| n.ends_with(".svg")),
        "artifacts missing: {names:?}"
    );
    let mut compared = 0;
    for name in &names {
        let a = std::fs::read(dir1.path().join(name)).unwrap();
        let b = std::fs::read(dir2.path().join(name)).unwrap();
        if name.ends_with(".json") {
            assert_eq!(
                normalize(&String::from_utf8(a).unwrap()),
                normalize(&String::from_utf8(b).unwrap()),
                "JSON artifact {name} differs between runs"
            );
        } else {
            assert_eq!(a, b, "artifact {name} differs between runs");
        }
        compared += 1;
    }
    assert!(compared >= 10, "only {compared} artifacts compared");

    let elapsed = t0.elapsed().as_secs_f64();
    println!(
        "criterion 13 (determinism): PASS — {compared} artifacts byte-identical across two runs, total {elapsed:.0} s < 1200 s"
    );
    assert!(elapsed < 1200.0, "two quickcheck runs took {elapsed:.0} s");
}
