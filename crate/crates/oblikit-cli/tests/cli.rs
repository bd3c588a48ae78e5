use std::fs;
use std::path::PathBuf;
use std::process::Command;

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> (bool, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_oblikit")).args(args).output().unwrap();
    (
        out.status.success(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn path_str(p: &PathBuf) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generated_grid_validates_cleanly() {
    let dir = scratch("gen");
    let g = dir.join("g.graph");
    let (ok, _, _) = run(&["gen-grid", "4", "4", "--unit", "--out", path_str(&g)]);
    assert!(ok);
    let text = fs::read_to_string(&g).unwrap();
    assert!(text.starts_with("16 24\n"), "{text}");

    let (ok, stdout, _) = run(&["validate", path_str(&g), "--gamma", "1,2,4"]);
    assert!(ok);
    for line in stdout.lines() {
        assert!(line.ends_with("ok"), "{line}");
    }
}

#[test]
fn generators_are_seed_deterministic() {
    let first = run(&["gen-tri", "12", "--seed", "7"]);
    let second = run(&["gen-tri", "12", "--seed", "7"]);
    let other = run(&["gen-tri", "12", "--seed", "8"]);
    assert!(first.0 && second.0 && other.0);
    assert_eq!(first.1, second.1);
    assert_ne!(first.1, other.1);
}

#[test]
fn corrupted_cover_dump_fails_validation() {
    let dir = scratch("corrupt");
    let g = dir.join("g.graph");
    run(&["gen-grid", "3", "3", "--unit", "--out", path_str(&g)]);
    let cover = dir.join("cover.txt");
    let (ok, _, _) = run(&["cover", path_str(&g), "--gamma", "1", "--out", path_str(&cover)]);
    assert!(ok);

    // The intact dump passes.
    let (ok, stdout, _) =
        run(&["validate", path_str(&g), "--gamma", "1", "--cover", path_str(&cover)]);
    assert!(ok, "{stdout}");

    // Shearing members off the first cluster leaves nodes uncovered.
    let text = fs::read_to_string(&cover).unwrap();
    let mut lines: Vec<String> = text.lines().map(str::to_owned).collect();
    let members = lines[0].find(" members ").unwrap();
    let leader = lines[0].split_whitespace().nth(5).unwrap().to_owned();
    lines[0] = format!("{} members {}", &lines[0][..members], leader);
    let bad = dir.join("bad.txt");
    fs::write(&bad, lines.join("\n") + "\n").unwrap();
    let (ok, stdout, _) =
        run(&["validate", path_str(&g), "--gamma", "1", "--cover", path_str(&bad)]);
    assert!(!ok);
    assert!(stdout.contains("VIOLATION"), "{stdout}");

    // A malformed line is rejected at parse time.
    let garbled = dir.join("garbled.txt");
    fs::write(&garbled, text.replace("cluster 0", "clutter 0")).unwrap();
    let (ok, stdout, _) =
        run(&["validate", path_str(&g), "--gamma", "1", "--cover", path_str(&garbled)]);
    assert!(!ok);
    assert!(stdout.contains("parse error"), "{stdout}");
}

#[test]
fn experiment_reproduces_the_golden_csv() {
    let dir = scratch("golden");
    let csv = dir.join("run.csv");
    let (ok, stdout, _) = run(&[
        "experiment", "--grid", "2", "2", "--unit", "--demands", "1", "--reps", "1",
        "--seed", "5", "--oracle", "--no-timing", "--out", path_str(&csv),
    ]);
    assert!(ok);
    assert!(stdout.contains("result pass"), "{stdout}");
    assert_eq!(
        fs::read_to_string(&csv).unwrap(),
        "instance,n,m,D,kappa,base,level,gamma,f,demands,C,Ci_src,Ci_dst,Q_i,\
         R_i_over_chi,C_star,ratio,ratio_bound,pass_eq1,pass_lemma6,pass_lemma4,elapsed_ms\n\
         grid2x2,4,4,2,2,96,0,0,identity,1,,0,1,432,,,,,,pass,,\n\
         grid2x2,4,4,2,2,96,1,1,identity,1,,0,0,41472,,,,,,pass,,\n\
         grid2x2,4,4,2,2,96,,,identity,1,1,,,,,1,1,5971968,pass,,,\n"
    );
}

#[test]
fn experiment_failure_row_sets_exit_code() {
    // A 4x4 grid blows the default oracle node budget; the pipeline keeps
    // going but reports the failure and the process exits nonzero.
    let dir = scratch("fail");
    let csv = dir.join("run.csv");
    let (ok, stdout, _) = run(&[
        "experiment", "--grid", "4", "4", "--unit", "--demands", "1", "--oracle",
        "--no-timing", "--out", path_str(&csv),
    ]);
    assert!(!ok);
    assert!(stdout.contains("result FAIL"), "{stdout}");
    let body = fs::read_to_string(&csv).unwrap();
    assert!(body.lines().last().unwrap().contains("error"), "{body}");
}

#[test]
fn routes_are_deterministic_and_consistent() {
    let dir = scratch("route");
    let g = dir.join("g.graph");
    run(&["gen-grid", "3", "3", "--out", path_str(&g), "--seed", "11"]);
    let all_a = run(&["route", path_str(&g), "--all"]);
    let all_b = run(&["route", path_str(&g), "--all"]);
    assert!(all_a.0 && all_b.0);
    assert_eq!(all_a.1, all_b.1);
    assert_eq!(all_a.1.lines().count(), 9 * 8);

    let (ok, one, _) = run(&["route", path_str(&g), "2", "7"]);
    assert!(ok);
    assert_eq!(one.lines().count(), 1);
    assert!(one.starts_with("path 2 7 "), "{one}");
    assert!(all_a.1.contains(one.trim_end()), "missing {one}");
}

#[test]
fn eval_emits_text_and_csv_reports() {
    let dir = scratch("eval");
    let g = dir.join("g.graph");
    run(&["gen-grid", "3", "3", "--unit", "--out", path_str(&g)]);
    let demands = dir.join("d.txt");
    fs::write(&demands, "0 8\n2 6 2\n").unwrap();

    let (ok, text, _) = run(&["eval", path_str(&g), path_str(&demands)]);
    assert!(ok);
    assert!(text.contains("cost instance g n 9 kappa 2 f identity demands 3"), "{text}");
    assert!(text.contains("decomposition pass"), "{text}");

    let (ok, csv, _) =
        run(&["eval", path_str(&g), path_str(&demands), "--csv", "--fusion", "power:0.5"]);
    assert!(ok);
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "instance,n,kappa,f,demands,C,C_star,ratio,bound");
    let row = lines.next().unwrap();
    assert!(row.starts_with("g,9,2,power:0.5,3,"), "{row}");
}

#[test]
fn oracle_prints_witness_and_oblivious_ratio() {
    let dir = scratch("oracle");
    let g = dir.join("tri.graph");
    fs::write(&g, "3 3\n0 1 1\n1 2 1\n0 2 1\nouter: 0 1 2\n").unwrap();
    let demands = dir.join("d.txt");
    fs::write(&demands, "1 2\n").unwrap();
    let (ok, stdout, _) = run(&["oracle", path_str(&g), path_str(&demands)]);
    assert!(ok, "{stdout}");
    // The optimum takes the direct edge; the oblivious route climbs to the
    // leader first, doubling the cost.
    assert_eq!(stdout, "C_star 1\nwitness 1 2 nodes 1 2\nC 2 ratio 2\n");
}

#[test]
fn curve_reduces_csv_to_max_ratio_per_size() {
    let dir = scratch("curve");
    let csv = dir.join("runs.csv");
    let mut body = String::from(
        "instance,n,m,D,kappa,base,level,gamma,f,demands,C,Ci_src,Ci_dst,Q_i,\
         R_i_over_chi,C_star,ratio,ratio_bound,pass_eq1,pass_lemma6,pass_lemma4,elapsed_ms\n",
    );
    body.push_str("a,9,12,4,2,96,,,identity,2,3,,,,,2,1.5,5971968,pass,,,\n");
    body.push_str("a,9,12,4,2,96,,,identity,2,5,,,,,4,1.25,5971968,pass,,,\n");
    body.push_str("b,25,40,8,2,96,,,identity,2,8,,,,,2,4,5971968,pass,,,\n");
    fs::write(&csv, body).unwrap();
    let (ok, stdout, _) = run(&["curve", path_str(&csv)]);
    assert!(ok);
    assert_eq!(stdout, "9 1.5\n25 4\n");
}

#[test]
fn bad_inputs_surface_as_errors() {
    let dir = scratch("errors");
    let g = dir.join("g.graph");
    run(&["gen-grid", "3", "3", "--unit", "--out", path_str(&g)]);

    let demands = dir.join("d.txt");
    fs::write(&demands, "0 99\n").unwrap();
    let (ok, _, stderr) = run(&["eval", path_str(&g), path_str(&demands)]);
    assert!(!ok);
    assert!(stderr.starts_with("error:"), "{stderr}");

    let (ok, _, stderr) = run(&["route", path_str(&g), "0", "9"]);
    assert!(!ok);
    assert!(stderr.contains("node ids must be below 9"), "{stderr}");

    let (ok, _, stderr) = run(&["eval", path_str(&g), path_str(&demands), "--fusion", "power:2"]);
    assert!(!ok);
    assert!(stderr.starts_with("error:"), "{stderr}");

    let (ok, _, _) = run(&["gen-grid", "1", "5"]);
    assert!(!ok);
}

#[test]
fn hierarchy_honors_base_override() {
    let dir = scratch("base");
    let g = dir.join("g.graph");
    run(&["gen-grid", "3", "3", "--unit", "--out", path_str(&g)]);
    let (ok, stdout, _) = run(&["hierarchy", path_str(&g), "--base", "4"]);
    assert!(ok);
    assert!(stdout.starts_with("hierarchy levels 3 top 2 base 4 diameter 4"), "{stdout}");
    assert!(stdout.contains("level 1 gamma 1"), "{stdout}");
}
