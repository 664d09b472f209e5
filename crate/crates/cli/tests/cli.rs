use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use schelling::graph::{moore_torus, write_edge_list};
use schelling::model::write_placement_file;
use schelling::{Placement, TypeAssignment};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_schelling")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn simulate_on_the_torus_converges() {
    let o = run(&[
        "simulate",
        "--topology",
        "moore",
        "--rows",
        "20",
        "--cols",
        "20",
        "--tau",
        "1/4",
        "--k",
        "2",
        "--mode",
        "swap",
        "--seed",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("verdict CONVERGED"), "{text}");
    let steps: usize = text.lines().find_map(|l| l.strip_prefix("steps ")).unwrap().parse().unwrap();
    assert!(steps <= 1600);
}

#[test]
fn simulate_on_a_stable_file_makes_no_moves() {
    let dir = tempfile::tempdir().unwrap();
    // 3x3 torus with columns of one type, all agents content at tau 1/4
    let g = moore_torus(3, 3).unwrap();
    let types = TypeAssignment::new((0..9).map(|a| usize::from(a >= 3)).collect()).unwrap();
    let p = Placement::new((0..9).collect(), 9).unwrap();
    fs::write(dir.path().join("g.edges"), write_edge_list(&g)).unwrap();
    fs::write(dir.path().join("p.placement"), write_placement_file(&types, &p)).unwrap();
    let o = run(&[
        "simulate",
        "--graph",
        &path(dir.path(), "g.edges"),
        "--placement",
        &path(dir.path(), "p.placement"),
        "--tau",
        "1/4",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("steps 0"));
}

#[test]
fn canonical_schedule_finds_the_jump_cycle() {
    let o = run(&["simulate", "--counterexample", "jsg-arbitrary", "--tau", "1/2", "--schedule", "canonical"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verdict CYCLE_DETECTED"));
}

#[test]
fn step_cap_is_not_an_error() {
    let o =
        run(&["simulate", "--counterexample", "ssg-k2", "--tau", "3/5", "--schedule", "canonical", "--max-steps", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verdict STEP_CAP_REACHED"));
}

#[test]
fn verify_constructions() {
    let o = run(&["verify", "--construction", "ssg-k2", "--tau", "3/5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.matches("unique").count(), 4);
    assert!(text.trim_end().ends_with("PASS"));

    let o = run(&["verify", "--construction", "opt-not-stable"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).trim_end().ends_with("PASS"));

    // outside the admissible range
    let o = run(&["verify", "--construction", "ssg-k2", "--tau", "1/10"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn potential_check_along_a_simulated_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = path(dir.path(), "t.csv");
    let common =
        ["--topology", "random-regular", "--nodes", "200", "--degree", "6", "--tau", "1/4", "--k", "3", "--seed", "4"];
    let o = run(&[&["simulate", "--out", &trace][..], &common].concat());
    assert_eq!(o.status.code(), Some(0));
    let o = run(&[&["verify", "--potential", "ssg", "--trace", &trace][..], &common].concat());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS"));

    let jump = ["--topology", "moore", "--mode", "jump", "--tau", "1/4", "--seed", "2"];
    let o = run(&[&["simulate", "--out", &trace][..], &jump].concat());
    assert_eq!(o.status.code(), Some(0));
    let o = run(&[&["verify", "--potential", "jsg", "--c", "15/32", "--trace", &trace][..], &jump].concat());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("bound 1/16"));

    // the edge potential goes back up around the regular jump cycle
    let cyc = ["--counterexample", "jsg-regular", "--tau", "7/10"];
    let o = run(&[&["simulate", "--schedule", "canonical", "--out", &trace][..], &cyc].concat());
    assert_eq!(o.status.code(), Some(0));
    let o = run(&[&["verify", "--potential", "jsg", "--trace", &trace][..], &cyc].concat());
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn optimal_examples() {
    let o = run(&["optimal", "--rings", "3,3,4", "--n1", "6", "--tau", "3/5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("SUBSET_SUM_DP 0"));

    let o = run(&["optimal", "--rings", "5,5", "--n1", "3", "--tau", "3/5", "--cross-check"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("SUBSET_SUM_DP 4") && text.contains("BRUTE_FORCE 4 agrees"), "{text}");

    let dir = tempfile::tempdir().unwrap();
    let prefix = path(dir.path(), "cliques");
    assert_eq!(run(&["verify", "--construction", "opt-not-stable", "--export", &prefix]).status.code(), Some(0));
    let o = run(&[
        "optimal",
        "--graph",
        &format!("{prefix}.edges"),
        "--placement",
        &format!("{prefix}.placement"),
        "--tau",
        "91/100",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("BRUTE_FORCE 7"));
}

#[test]
fn oversized_brute_force_exits_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let g = moore_torus(10, 10).unwrap();
    let types = TypeAssignment::from_counts(&[50, 50]).unwrap();
    fs::write(dir.path().join("g.edges"), write_edge_list(&g)).unwrap();
    fs::write(
        dir.path().join("p.placement"),
        write_placement_file(&types, &Placement::new((0..100).collect(), 100).unwrap()),
    )
    .unwrap();
    let o = run(&[
        "optimal",
        "--graph",
        &path(dir.path(), "g.edges"),
        "--placement",
        &path(dir.path(), "p.placement"),
        "--tau",
        "1/2",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn usage_errors_exit_with_2() {
    assert_eq!(run(&["simulate", "--topology", "moore", "--tau", "0.25"]).status.code(), Some(2));
    assert_eq!(run(&["simulate", "--topology", "moore"]).status.code(), Some(2));
    assert_eq!(run(&["experiment", "--tau", "1/4", "--mode", "sideways"]).status.code(), Some(2));
    assert_eq!(run(&["optimal", "--tau", "3/5"]).status.code(), Some(2));
}

#[test]
fn experiment_csv_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &str| {
        run(&[
            "experiment",
            "--topology",
            "moore,random-regular",
            "--mode",
            "swap,jump",
            "--sizes",
            "6,9",
            "--tau",
            "1/4",
            "--trials",
            "5",
            "--seed",
            "7",
            "--out",
            out,
        ])
    };
    let (a, b) = (path(dir.path(), "a.csv"), path(dir.path(), "b.csv"));
    assert_eq!(args(&a).status.code(), Some(0));
    assert_eq!(args(&b).status.code(), Some(0));
    let (ta, tb) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let text = String::from_utf8(ta).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("topology,n,m,tau,k,mode,aggregation,seed,moves,rounds,verdict"));
    assert_eq!(lines.clone().count(), 2 * 2 * 2 * 5);
    assert!(lines.all(|l| l.ends_with(",CONVERGED")));

    // one trial, fixed seed
    let (c, d) = (path(dir.path(), "c.csv"), path(dir.path(), "d.csv"));
    for out in [&c, &d] {
        let o = run(&[
            "experiment",
            "--mode",
            "jump",
            "--sizes",
            "10",
            "--tau",
            "1/4",
            "--trials",
            "1",
            "--seed",
            "3",
            "--out",
            out,
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(fs::read(&c).unwrap(), fs::read(&d).unwrap());

    let svg = path(dir.path(), "p.svg");
    assert_eq!(run(&["plot", "--csv", &a, "--out", &svg]).status.code(), Some(0));
    let s = fs::read_to_string(&svg).unwrap();
    assert!(s.starts_with("<svg") && s.contains("moore_torus swap") && s.contains("random_regular jump"));
}

#[test]
fn plot_rejects_empty_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = path(dir.path(), "e.csv");
    fs::write(&csv, "topology,n,m,tau,k,mode,aggregation,seed,moves,rounds,verdict\n").unwrap();
    let o = run(&["plot", "--csv", &csv, "--out", &path(dir.path(), "p.svg")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no data"));
}
