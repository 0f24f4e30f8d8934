mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use common::{data_file, problem};
use equipass::cli::parse_candidate_record;
use equipass::functional::LoopState;

fn equipass(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_equipass")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(name: &str) -> String {
    data_file(name).to_string_lossy().into_owned()
}

#[test]
fn bartsch_on_z2() {
    let o = equipass(&["burnside", "bartsch", &path("z2.group")]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("ghost 0,-2\n"), "{s}");
    assert!(s.contains("verdict=PASS"));
}

#[test]
fn marks_of_trivial_group() {
    let o = equipass(&["burnside", "marks", &path("trivial.group")]);
    assert_eq!(o.status.code(), Some(0));
    let table: Vec<String> = stdout(&o).lines().filter(|l| !l.starts_with('#')).map(String::from).collect();
    assert_eq!(table, vec!["1"]);
}

#[test]
fn malformed_group_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.group");
    fs::write(&bad, "group G degree=3\n(0 1)\n(0 5)\n").unwrap();
    let o = equipass(&["burnside", "marks", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"), "{:?}", o);
}

#[test]
fn cap_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_equipass"))
        .args(["burnside", "marks", &path("d4.group")])
        .env("EQUIPASS_CAP", "4")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn crystal_diagram_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let diagram = dir.path().join("dihedral.diagram");
    let o = equipass(&["crystal", "check", &path("infinite_dihedral.crystal"), "--emit-diagram", diagram.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("maximal_classes=2") && s.contains("verdict=PASS"), "{s}");
    let o = equipass(&["burnside", "limit", diagram.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("rank=3\n"));
}

#[test]
fn identity_action_fails_condition_m() {
    let o = equipass(&["crystal", "check", &path("trivial_action.crystal")]);
    assert_eq!(o.status.code(), Some(2));
    let s = stdout(&o);
    assert!(s.contains("free_outside_zero=false") && s.contains("verdict=FAIL"));
}

fn solve(cfg: &str, out: &Path, seed: &str) -> Output {
    equipass(&[
        "solve",
        "--problem",
        &path(cfg),
        "--solver",
        &path("solver.cfg"),
        "--out",
        out.to_str().unwrap(),
        "--seed",
        seed,
    ])
}

#[test]
fn pendulum_solve_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let o = solve("pendulum.cfg", dir.path(), "7");
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let manifest = fs::read_to_string(dir.path().join("manifest.txt")).unwrap();
    let artifacts: Vec<&str> = manifest.lines().filter_map(|l| l.strip_prefix("artifact=")).collect();
    assert!(artifacts.len() >= 5);
    for a in &artifacts {
        let text = fs::read_to_string(dir.path().join(a)).unwrap();
        if a.ends_with(".loop") {
            LoopState::from_text(&text).unwrap();
        } else if a.ends_with(".tsv") {
            assert!(text.starts_with("# t q_1"));
            assert_eq!(text.lines().count(), 257);
            for line in text.lines().skip(1) {
                assert!(line.split_whitespace().all(|x| x.parse::<f64>().is_ok()));
            }
        }
    }
    assert!(manifest.lines().any(|l| l.starts_with("config_digest=") && l.len() == "config_digest=".len() + 64));

    let p = problem(&fs::read_to_string(data_file("pendulum.cfg")).unwrap());
    let records = fs::read_to_string(dir.path().join("candidates.txt")).unwrap();
    let mut orbits = std::collections::BTreeSet::new();
    for line in records.lines() {
        let r = parse_candidate_record(line).unwrap();
        orbits.insert(r.orbit);
        let q = LoopState::from_text(&fs::read_to_string(dir.path().join(&r.file)).unwrap()).unwrap();
        let c = equipass::minimax::CriticalCandidate::new(p.as_ref(), &q, 1e-6, "reloaded").unwrap();
        assert!((c.value - r.value).abs() <= 1e-10 * (1.0 + r.value.abs()));
        assert!(c.gradient_norm <= 1e-6);
    }
    assert!(orbits.len() >= 2);
}

#[test]
fn solve_is_deterministic_per_seed() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    solve("coupled.cfg", a.path(), "99");
    solve("coupled.cfg", b.path(), "99");
    let read = |d: &Path| -> Vec<f64> {
        fs::read_to_string(d.join("candidates.txt"))
            .unwrap()
            .lines()
            .map(|l| parse_candidate_record(l).unwrap().value)
            .collect()
    };
    let (va, vb) = (read(a.path()), read(b.path()));
    assert_eq!(va.len(), vb.len());
    for (x, y) in va.iter().zip(&vb) {
        assert!((x - y).abs() <= 1e-8);
    }
}

#[test]
fn convex_problem_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = solve("convex.cfg", dir.path(), "1");
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn forcing_with_reflection_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("p.cfg");
    fs::write(&cfg, "problem=pendulum\nforcing=cos1\nforcing_amp=0.5\nsymmetry=neg\nmodes=8\n").unwrap();
    let o = equipass(&["solve", "--problem", cfg.to_str().unwrap(), "--out", dir.path().join("out").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4), "{}", stdout(&o));
}

#[test]
fn forced_pendulum_with_lattice_symmetry_solves() {
    let dir = tempfile::tempdir().unwrap();
    let o = solve("forced_pendulum.cfg", dir.path(), "5");
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn deformation_certificate_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let solver = dir.path().join("solver.cfg");
    fs::write(&solver, "epsilon=0.05\ndelta=0.3\n").unwrap();
    let o = equipass(&[
        "solve",
        "--problem",
        &path("pendulum.cfg"),
        "--solver",
        solver.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l.starts_with("deformation level=")));
}

#[test]
fn unknown_problem_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("p.cfg");
    fs::write(&cfg, "problem=double_well\n").unwrap();
    let o = equipass(&["solve", "--problem", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown problem"));
}
