use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn randfa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_randfa"))
        .args(args)
        .current_dir(fixtures())
        .env_remove("RANDFA_SEED")
        .output()
        .expect("running randfa")
}

/// Compares stdout with `tests/golden/<name>.out`; `UPDATE_GOLDEN=1` rewrites it.
fn golden(name: &str, args: &[&str], code: i32) {
    let out = randfa(args);
    assert_eq!(out.status.code(), Some(code), "{name}: stderr {}", String::from_utf8_lossy(&out.stderr));
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.out"));
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(&path, &out.stdout).unwrap();
    }
    let want = fs::read(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert!(
        want == out.stdout,
        "{name}: output differs from golden file\n--- got ---\n{}",
        String::from_utf8_lossy(&out.stdout)
    );
}

#[test]
fn count_full_automaton() {
    golden("count_full_reduced", &["count", "--automaton", "full.json", "--L", "3", "--reduced"], 0);
    let out = randfa(&["count", "--automaton", "full.json", "--L", "3"]);
    assert!(String::from_utf8_lossy(&out.stdout).ends_with("\n64\n"));
}

#[test]
fn growth_table() {
    golden("growth_starts_a", &["growth", "--automaton", "starts_a.json", "--Lmax", "6", "--reduced"], 0);
}

#[test]
fn certify_exit_codes() {
    golden("certify_all_len2", &["certify", "--presentation", "all_len2.txt"], 0);
    golden("certify_free_group", &["certify", "--presentation", "empty.txt"], 1);
    golden("certify_free_group_json", &["certify", "--presentation", "empty.txt", "--json"], 1);
    golden(
        "certify_budget_exhausted",
        &["certify", "--presentation", "all_len2.txt", "--force-search", "--budget", "1"],
        2,
    );
}

#[test]
fn certify_through_blocks() {
    golden("certify_blocks", &["certify", "--presentation", "all_len4.txt", "--blocks", "2", "--d", "1/2"], 0);
}

#[test]
fn certify_json_is_versioned() {
    let out = randfa(&["certify", "--presentation", "empty.txt", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["status"], "NotCertified");
    assert_eq!(v["config"]["presentation"], "empty.txt");
    assert_eq!(v["witness"]["n"], 2);
}

#[test]
fn encode_pairs_relators() {
    golden("encode_pairing", &["encode", "--presentation", "pairing.txt", "--B", "2"], 0);
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("hat.txt");
    let out = randfa(&["encode", "--presentation", "pairing.txt", "--B", "2", "--out", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(fs::read_to_string(&target).unwrap(), "n 6\nblocks 2 2\n[ab][aa][aa][ba]\n");
    let log: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("hat.txt.pairing.json")).unwrap()).unwrap();
    assert_eq!(log["offset"], 1);
    assert_eq!(log["pairings"][0]["v"], "b");
    // The encoded file is itself a valid input.
    let out = randfa(&["certify", "--presentation", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn lemmas_report() {
    golden("lemmas_abba", &["lemmas", "--assignment", "abba.json", "--Lmax", "6"], 0);
    golden("lemmas_conjugated", &["lemmas", "--assignment", "conjugated.json", "--Lmax", "4"], 1);
}

#[test]
fn sample_seeds() {
    golden("sample_seed5", &["sample", "--n", "2", "--d", "3/10", "--L", "8", "--seed", "5"], 0);
    let from_env = Command::new(env!("CARGO_BIN_EXE_randfa"))
        .args(["sample", "--n", "2", "--d", "3/10", "--L", "8"])
        .env("RANDFA_SEED", "5")
        .output()
        .unwrap();
    assert_eq!(from_env.stdout, randfa(&["sample", "--n", "2", "--d", "3/10", "--L", "8", "--seed", "5"]).stdout);
    let flag_wins = Command::new(env!("CARGO_BIN_EXE_randfa"))
        .args(["sample", "--n", "2", "--d", "3/10", "--L", "8", "--seed", "6"])
        .env("RANDFA_SEED", "5")
        .output()
        .unwrap();
    assert_ne!(flag_wins.stdout, from_env.stdout);
    assert!(String::from_utf8_lossy(&flag_wins.stdout).contains("# seed: 6\n"));
}

#[test]
fn sampled_files_parse_back() {
    let dir = tempfile::tempdir().unwrap();
    for (name, json) in [("p.txt", false), ("p.json", true)] {
        let path = dir.path().join(name);
        let mut args = vec!["sample", "--n", "3", "--d", "0.25", "--L", "6", "--model", "cyclic", "--seed", "1"];
        let p = path.to_str().unwrap();
        args.extend(["--out", p]);
        if json {
            args.push("--json");
        }
        assert_eq!(randfa(&args).status.code(), Some(0));
        let file = randfa::formats::read_presentation(&path).unwrap();
        assert_eq!(file.presentation.relators.len(), 11);
        assert!(file.presentation.relators.iter().all(|r| r.is_cyclically_reduced(&file.presentation.alphabet)));
    }
}

#[test]
fn usage_errors_exit_64() {
    let out = randfa(&["count", "--automaton", "full.json", "--L", "3", "--bogus"]);
    assert_eq!(out.status.code(), Some(64));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    let out = randfa(&["certify", "--presentation", "does_not_exist.txt"]);
    assert_eq!(out.status.code(), Some(64));
    assert!(String::from_utf8_lossy(&out.stderr).contains("does_not_exist.txt"));
    let out = randfa(&["sample", "--n", "2", "--d", "3/2", "--L", "4"]);
    assert_eq!(out.status.code(), Some(64));
    assert_eq!(randfa(&["--help"]).status.code(), Some(0));
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("config.json");
    fs::write(&path, body).unwrap();
    path
}

#[test]
fn experiments_replay_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let records = dir.path().join("intersect.csv");
    let config = write_config(
        dir.path(),
        &format!(
            r#"{{"n": 2, "d": "3/10", "L_values": [6, 10], "trials": 200, "seed": 11, "output_path": {:?}}}"#,
            records.to_str().unwrap()
        ),
    );
    let c = config.to_str().unwrap();
    let out = randfa(&["experiment", "intersect", "--config", c, "--threads", "8"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let eight = fs::read(&records).unwrap();
    let out = randfa(&["experiment", "intersect", "--config", c, "--threads", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(fs::read(&records).unwrap(), eight);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("# seed: 11\n"));
    assert!(text.contains("manifest:"));

    let manifest = dir.path().join("intersect.csv.manifest.json");
    let out = randfa(&["experiment", "replay", "--manifest", manifest.to_str().unwrap(), "--threads", "8"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("identical: yes"));
    assert_eq!(
        fs::read_to_string(&records).unwrap().lines().next().unwrap(),
        "experiment,L,trial,derived_seed,outcome,detail,wall_ms"
    );

    let out = randfa(&["experiment", "certify", "--config", c]);
    assert_eq!(out.status.code(), Some(64));
    assert!(String::from_utf8_lossy(&out.stderr).contains("require B"));
}

#[test]
fn certificate_experiment_reports_the_block_condition() {
    let dir = tempfile::tempdir().unwrap();
    let records = dir.path().join("certify.csv");
    let config = write_config(
        dir.path(),
        &format!(
            r#"{{"n": 2, "d": "1/2", "L_values": [4, 5], "B": 2, "trials": 4, "seed": 3, "output_path": {:?}}}"#,
            records.to_str().unwrap()
        ),
    );
    let out = randfa(&["experiment", "certify", "--config", config.to_str().unwrap(), "--threads", "4"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("block-length condition at B = 2: fails"));
    let recs = randfa::experiments::read_records(&records).unwrap();
    assert_eq!(recs.len(), 8);
    assert!(recs.iter().all(|r| ["Certified", "NotCertified", "Unknown"].contains(&r.outcome.as_str())));
    assert!(recs.iter().filter(|r| r.length == 5).all(|r| r.detail.contains("pairings=")));
}
