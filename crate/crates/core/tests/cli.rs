use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_imp-forecast");

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .current_dir(dir)
        .env_remove("IMP_FORECAST_THREADS")
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn study(dir: &Path, data: &str, seed: &str, report: &str, models: &str, extra: &[&str]) -> Output {
    let mut args = vec![
        "study", "--data", data, "--seed", seed, "--out-report", report, "--out-models", models,
    ];
    args.extend_from_slice(extra);
    run(dir, &args)
}

#[test]
fn end_to_end_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let g = run(d, &["generate", "--n", "80", "--seed", "7", "--out", "c.csv"]);
    assert!(g.status.success(), "{}", stderr(&g));
    let csv_before = fs::read(d.join("c.csv")).unwrap();

    let a = study(d, "c.csv", "7", "r1.json", "m1.json", &["--threads", "2"]);
    assert!(a.status.success(), "{}", stderr(&a));
    let b = Command::new(BIN)
        .args(["study", "--data", "c.csv", "--seed", "7", "--out-report", "r2.json", "--out-models", "m2.json"])
        .current_dir(d)
        .env("IMP_FORECAST_THREADS", "3")
        .output()
        .unwrap();
    assert!(b.status.success(), "{}", stderr(&b));
    assert_eq!(fs::read(d.join("r1.json")).unwrap(), fs::read(d.join("r2.json")).unwrap());
    assert_eq!(fs::read(d.join("m1.json")).unwrap(), fs::read(d.join("m2.json")).unwrap());
    assert_eq!(fs::read(d.join("c.csv")).unwrap(), csv_before);

    let rep = run(d, &["report", "--in", "r1.json", "--format", "text"]);
    assert!(rep.status.success());
    let text = String::from_utf8(rep.stdout).unwrap();
    assert!(text.contains("Label    | Best Algorithm"));
    assert!(text.contains("| Features Group | RMSE"));
    assert!(text.contains("| 0-1 "));
    assert!(text.contains("| 0-3 "));
    assert!(text.contains("EI_1M_12 |"));

    let csv = run(d, &["report", "--in", "r1.json", "--format", "csv"]);
    assert_eq!(String::from_utf8(csv.stdout).unwrap().lines().count(), 13);

    let p = run(d, &["predict", "--models", "m1.json", "--data", "c.csv", "--out", "p.csv"]);
    assert!(p.status.success(), "{}", stderr(&p));
    let preds = fs::read_to_string(d.join("p.csv")).unwrap();
    assert_eq!(preds.lines().count(), 1 + 80 * 12);
    assert!(preds.starts_with("row,channel,label,kind,group,prediction_kohm,rmse,hint\n"));
    assert!(preds.lines().nth(1).unwrap().contains(" kΩ"));
}

#[test]
fn missing_column_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(run(d, &["generate", "--n", "20", "--out", "c.csv"]).status.success());
    let text = fs::read_to_string(d.join("c.csv")).unwrap();
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    let drop = header.iter().position(|h| *h == "ei_intra_5").unwrap();
    let cut: String = text
        .lines()
        .map(|l| {
            let mut cells: Vec<&str> = l.split(',').collect();
            cells.remove(drop);
            cells.join(",") + "\n"
        })
        .collect();
    fs::write(d.join("cut.csv"), cut).unwrap();
    let o = study(d, "cut.csv", "1", "r.json", "m.json", &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("ei_intra_5"), "{}", stderr(&o));
    assert!(!d.join("r.json").exists());
}

#[test]
fn unlabeled_data_cannot_be_studied_but_can_be_predicted() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(run(d, &["generate", "--n", "30", "--seed", "3", "--out", "c.csv"]).status.success());
    let text = fs::read_to_string(d.join("c.csv")).unwrap();
    let unlabeled: String = text
        .lines()
        .map(|l| l.split(',').take(13).collect::<Vec<_>>().join(",") + "\n")
        .collect();
    fs::write(d.join("u.csv"), unlabeled).unwrap();
    assert_eq!(study(d, "u.csv", "1", "r.json", "m.json", &[]).status.code(), Some(2));
    assert!(study(d, "c.csv", "1", "r.json", "m.json", &["--set", "nnr.epochs=200"]).status.success());
    let p = run(d, &["predict", "--models", "m.json", "--data", "u.csv", "--out", "p.csv"]);
    assert!(p.status.success(), "{}", stderr(&p));
}

#[test]
fn usage_and_data_errors_have_distinct_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(run(d, &["study"]).status.code(), Some(1));
    assert_eq!(run(d, &["generate", "--n", "0", "--out", "x.csv"]).status.code(), Some(1));
    assert_eq!(run(d, &["generate", "--out", "no/such/dir/x.csv"]).status.code(), Some(1));
    assert!(run(d, &["generate", "--n", "15", "--out", "c.csv"]).status.success());
    let bad_set = study(d, "c.csv", "1", "r.json", "m.json", &["--set", "bdtr.learning_rate=2"]);
    assert_eq!(bad_set.status.code(), Some(1));
    let bad_frac = study(d, "c.csv", "1", "r.json", "m.json", &["--test-fraction", "1.5"]);
    assert_eq!(bad_frac.status.code(), Some(1));
    let same = study(d, "c.csv", "1", "c.csv", "m.json", &[]);
    assert_eq!(same.status.code(), Some(1));
    assert_eq!(study(d, "absent.csv", "1", "r.json", "m.json", &[]).status.code(), Some(2));

    fs::write(d.join("junk.json"), "{\"format_version\": 1}").unwrap();
    assert_eq!(run(d, &["report", "--in", "junk.json"]).status.code(), Some(2));
    let p = run(d, &["predict", "--models", "junk.json", "--data", "c.csv", "--out", "p.csv"]);
    assert_eq!(p.status.code(), Some(2));

    let text = fs::read_to_string(d.join("c.csv")).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let mut cells: Vec<&str> = lines[3].split(',').collect();
    cells[1] = "-4.5";
    lines[3] = cells.join(",");
    fs::write(d.join("neg.csv"), lines.join("\n") + "\n").unwrap();
    let o = study(d, "neg.csv", "1", "r.json", "m.json", &[]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("row 3"), "{}", stderr(&o));
}

#[test]
fn help_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    for sub in ["generate", "study", "predict", "report"] {
        let o = run(dir.path(), &[sub, "--help"]);
        assert_eq!(o.status.code(), Some(0), "{sub}");
    }
    assert_eq!(run(dir.path(), &["--version"]).status.code(), Some(0));
}
