use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use mbbp::CampaignReport;

const T1: &str = "p bip 3 3 8\ne 1 1\ne 1 2\ne 1 3\ne 2 1\ne 2 2\ne 2 3\ne 3 1\ne 3 2\n";

fn mbbp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mbbp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_t1(dir: &Path) -> String {
    let path = dir.join("t1.bip");
    fs::write(&path, T1).unwrap();
    path.to_str().unwrap().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn solve_t1_json() {
    let dir = tempfile::tempdir().unwrap();
    let t1 = write_t1(dir.path());
    let out = mbbp(&["solve", "--in", &t1, "--runs", "4", "--seed", "3", "--emit", "json"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let report = CampaignReport::from_json(&stdout(&out)).unwrap();
    let r = report.solved().next().unwrap();
    assert_eq!((r.best, r.optimal_runs, r.runs.len()), (2, 4, 4));
    assert_eq!(r.runs[3].seed, 6);
}

#[test]
fn gen_then_solve_csv_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let bip = dir.path().join("g.bip");
    let out = mbbp(&["gen", "--gen", "20,0.5,1", "--out", bip.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(fs::read_to_string(&bip).unwrap().contains("p bip 20 20 "));

    let csv = dir.path().join("r.csv");
    let out = mbbp(&[
        "solve", "--in", bip.to_str().unwrap(), "--gen", "20,0.5,1", "--time-limit", "0.5",
        "--emit", "csv", "--out", csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let rows = CampaignReport::parse_csv(&fs::read_to_string(&csv).unwrap()).unwrap();
    assert_eq!(rows.len(), 2);
    // the file and the generator describe the same graph
    assert_eq!(rows[0].edges, rows[1].edges);
    assert_eq!(rows[0].best, rows[1].best);
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = mbbp(&["solve", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("Usage"));
}

#[test]
fn all_instances_failing_is_an_error() {
    let out = mbbp(&["solve", "--in", "/nonexistent/graph.bip"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("graph.bip"));
}

#[test]
fn missing_instance_is_an_error() {
    let out = mbbp(&["solve"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("no instance"));
}

#[test]
fn export_lp_plain_and_peeled() {
    let dir = tempfile::tempdir().unwrap();
    let t1 = write_t1(dir.path());
    let lp = dir.path().join("t1.lp");
    let out = mbbp(&["export-lp", "--in", &t1, "--out", lp.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = fs::read_to_string(&lp).unwrap();
    assert!(text.contains("n1: xU_3 + xV_3 <= 1"));
    assert!(!text.contains("n2:"));

    let out = mbbp(&["export-lp", "--in", &t1, "--peel-with-best", "--time-limit", "1"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stderr(&out).contains("best balanced size 2"));
    // every vertex of T1 has degree at most 2
    assert!(!stdout(&out).contains("xU_1"));
}

#[test]
fn export_lp_cap() {
    let out = mbbp(&["export-lp", "--gen", "30,0.5,1", "--cap", "10"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("above the cap of 10"));
}

#[test]
fn fetch_unknown_name_lists_datasets() {
    let dir = tempfile::tempdir().unwrap();
    let out = mbbp(&["fetch", "nonexistent", "--cache-dir", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("moreno_crime"));
}

#[test]
fn cache_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("moreno_crime");
    fs::create_dir_all(data.join("moreno_crime")).unwrap();
    fs::write(data.join("moreno_crime").join("out.moreno_crime"), "% bip\n1 1\n1 2\n2 1\n2 2\n").unwrap();
    fs::write(data.join(".complete"), "").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_mbbp"))
        .args(["solve", "--konect", "moreno_crime", "--emit", "json"])
        .env("MBBP_CACHE_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let report = CampaignReport::from_json(&stdout(&out)).unwrap();
    let r = report.solved().next().unwrap();
    assert_eq!((r.best, r.meta.edge_count), (2, 4));
}

#[test]
fn variants_reduction_study() {
    let dir = tempfile::tempdir().unwrap();
    let t1 = write_t1(dir.path());
    let out = mbbp(&["variants", "--study", "reduction", "--in", &t1, "--time-limit", "0.2"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("peel+exact") && text.contains("t1.bip"));
}

#[test]
fn bad_parameter_values() {
    for args in [
        &["solve", "--gen", "10,0.5", "--time-limit", "1"][..],
        &["solve", "--gen", "10,0.5,1", "--unbalance", "3"],
        &["solve", "--gen", "10,0.5,1", "--reduction", "all"],
        &["solve", "--gen", "10,0.5,1", "--emit", "xml"],
    ] {
        assert_eq!(mbbp(args).status.code(), Some(2), "{args:?}");
    }
    let out = mbbp(&["solve", "--gen", "10,0.5,1", "--L", "0"]);
    assert_eq!(out.status.code(), Some(1));
}
