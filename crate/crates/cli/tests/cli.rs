use std::fs;
use std::path::Path;
use std::process::Command;

fn pushwass() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pushwass"))
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn every_subcommand_is_byte_identical_across_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("config.json");
    fs::write(&config, r#"{"histogram": {"seeds": 3, "budgets": [16, 32, 64]}}"#).unwrap();
    for sub in ["converge", "bounds", "compare-hist", "demo-oscillator"] {
        let outs: Vec<_> = ["a", "b"]
            .iter()
            .map(|run| {
                let out = tmp.path().join(format!("{sub}-{run}"));
                let status = pushwass()
                    .args([sub, "--config"])
                    .arg(&config)
                    .arg("--out")
                    .arg(&out)
                    .args(["--seed", "42", "--ref-resolution", "1000"])
                    .output()
                    .unwrap();
                assert!(status.status.success(), "{sub}: {}", String::from_utf8_lossy(&status.stderr));
                snapshot(&out)
            })
            .collect();
        assert!(!outs[0].is_empty());
        assert_eq!(outs[0], outs[1], "{sub}");
    }
}

#[test]
fn sequential_flag_matches_parallel_output() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("par"), tmp.path().join("seq"));
    assert!(pushwass().args(["converge", "--ref-resolution", "800", "--out"]).arg(&a).status().unwrap().success());
    assert!(pushwass().args(["converge", "--sequential", "--ref-resolution", "800", "--out"]).arg(&b).status().unwrap().success());
    assert_eq!(snapshot(&a), snapshot(&b));
}

#[test]
fn unknown_config_keys_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("bad.json");
    fs::write(&config, r#"{"problem": {"name": "tanh-paper"}, "refresolution": 10}"#).unwrap();
    let out = pushwass().args(["converge", "--config"]).arg(&config).arg("--out").arg(tmp.path().join("o")).output().unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("refresolution") && err.contains("bad.json"), "{err}");
}

#[test]
fn csv_uses_lf_and_seventeen_digits() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    assert!(pushwass().args(["demo-oscillator", "--ref-resolution", "500", "--out"]).arg(&out).status().unwrap().success());
    let text = fs::read_to_string(out.join("convergence.csv")).unwrap();
    assert!(!text.contains('\r'));
    let header = text.lines().next().unwrap();
    assert_eq!(header, "N,w1,w2,l1cdf,l1pdf,hm1,walltime_ms");
    let first = text.lines().nth(1).unwrap();
    let mantissa = first.split(',').nth(1).unwrap().split('e').next().unwrap();
    assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17);
}

#[test]
fn help_documents_histogram_bins() {
    let out = pushwass().args(["compare-hist", "--help"]).output().unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("last, which is closed"), "{text}");
}
