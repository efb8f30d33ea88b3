use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const C4: &str = "rap 1\ngraph 2 2\nedge 0 0 1 v\nedge 1 0 1 v\nedge 1 1 1 v\nedge 0 1 1 v\n";

fn rap(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rap")).current_dir(dir).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn gen_gk_counts() {
    let dir = tempfile::tempdir().unwrap();
    let out = rap(dir.path(), &["gen", "--family", "gk", "--k", "3", "--out", "g3.rap"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "nodes 8 edges 12");
}

#[test]
fn gen_random_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["gen", "--family", "random", "--seed", "1", "--n-r", "5", "--n-t", "5", "--vuln-prob", "0.5"];
    let a = rap(dir.path(), &args);
    let b = rap(dir.path(), &args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn gen_set_cover_sizes() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("sc.txt"), "setcover 3 2\nset 1 2\nset 2 3\n").unwrap();
    let out = rap(dir.path(), &["gen", "--family", "setcover", "--variant", "basic", "--in", "sc.txt", "--out", "x.rap"]);
    assert_eq!(out.status.code(), Some(0));
    // 2|S| + k nodes per side
    assert_eq!(stdout(&out).trim().split(' ').nth(1), Some("14"));
    assert!(rap(dir.path(), &["gen", "--family", "gk", "--k", "2"]).status.code() == Some(1));
}

#[test]
fn solve_exact_c4() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c4.rap"), C4).unwrap();
    let out = rap(dir.path(), &["solve", "--algo", "exact", "--in", "c4.rap", "--out", "c4.sol"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("algo exact cost 4 "));
    assert_eq!(fs::read_to_string(dir.path().join("c4.sol")).unwrap(), "solution 4\n0\n1\n2\n3\n");
}

#[test]
fn solve_ear_g3_and_lp_round_determinism() {
    let dir = tempfile::tempdir().unwrap();
    rap(dir.path(), &["gen", "--family", "gk", "--k", "3", "--out", "g3.rap"]);
    let out = rap(dir.path(), &["solve", "--algo", "ear", "--in", "g3.rap", "--ear-dump", "ears.txt"]);
    assert_eq!(out.status.code(), Some(0));
    let cost: usize = stdout(&out).split_whitespace().nth(3).unwrap().parse().unwrap();
    assert!((8..=10).contains(&cost));
    assert!(fs::read_to_string(dir.path().join("ears.txt")).unwrap().starts_with("component 0 ear 0 first 0\n"));

    let solve = |name: &str| {
        let out = rap(dir.path(), &["solve", "--algo", "lp-round", "--in", "g3.rap", "--seed", "7", "--out", name]);
        assert_eq!(out.status.code(), Some(0));
        (stdout(&out), fs::read(dir.path().join(name)).unwrap())
    };
    assert_eq!(solve("a.sol"), solve("b.sol"));
}

#[test]
fn solve_infeasible_instance_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("one.rap"), "rap 1\ngraph 1 1\nedge 0 0 1 v\n").unwrap();
    for algo in ["ear", "exact", "lp-round"] {
        assert_eq!(rap(dir.path(), &["solve", "--algo", algo, "--in", "one.rap"]).status.code(), Some(2), "{algo}");
    }
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c4.rap"), C4).unwrap();
    fs::write(dir.path().join("all.sol"), "solution 4\n0\n1\n2\n3\n").unwrap();
    fs::write(dir.path().join("half.sol"), "solution 2\n1\n3\n").unwrap();
    fs::write(dir.path().join("bad.rap"), "not an instance\n").unwrap();

    let ok = rap(dir.path(), &["verify", "--in", "c4.rap", "--solution", "all.sol"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).contains("4 scenarios certified"));

    let fail = rap(dir.path(), &["verify", "--in", "c4.rap", "--solution", "half.sol"]);
    assert_eq!(fail.status.code(), Some(3));
    assert!(stdout(&fail).contains("scenario e1"));

    let bad = rap(dir.path(), &["verify", "--in", "bad.rap", "--solution", "all.sol"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn bench_rows_and_order() {
    let dir = tempfile::tempdir().unwrap();
    for k in 3..=5 {
        rap(dir.path(), &["gen", "--family", "gk", "--k", &k.to_string(), "--out", &format!("g{k}.rap")]);
    }
    fs::write(dir.path().join("sweep.txt"), "g3.rap ear exact\ng4.rap ear exact\ng5.rap ear exact\n").unwrap();
    let run = |jobs: &str| {
        let out = rap(dir.path(), &["bench", "--manifest", "sweep.txt", "--jobs", jobs]);
        assert_eq!(out.status.code(), Some(0));
        stdout(&out)
    };
    let csv = run("1");
    let rows: Vec<Vec<String>> =
        csv.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect();
    assert_eq!(rows.len(), 6);
    for row in &rows {
        assert_eq!(row[9], "true");
        let ratio: f64 = row[6].parse().unwrap();
        assert!(ratio <= 1.5, "{row:?}");
    }
    let strip_ms = |text: &str| -> Vec<String> {
        text.lines().map(|l| l.split(',').enumerate().filter(|(i, _)| *i != 8).map(|(_, f)| f).collect()).collect()
    };
    assert_eq!(strip_ms(&csv), strip_ms(&run("4")));

    fs::write(dir.path().join("one.txt"), "g3.rap lp-round\n").unwrap();
    let out = rap(dir.path(), &["bench", "--manifest", "one.txt", "--seeds", "0..20", "--jobs", "4"]);
    let csv = stdout(&out);
    assert_eq!(csv.lines().count(), 21);
    assert!(csv.lines().skip(1).all(|l| l.split(',').nth(9) == Some("true")));

    fs::write(dir.path().join("empty.txt"), "# nothing\n").unwrap();
    let out = rap(dir.path(), &["bench", "--manifest", "empty.txt"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "instance,algo,seed,cost,lb,exact,ratio,iters,ms,feasible,error\n");
}
