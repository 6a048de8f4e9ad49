use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn folkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_folkit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/corpus")
        .join(name)
}

fn problem_file(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const REDUCED: &str = "ax4,ax5,ax7,ax8,ax10,ax12";

#[test]
fn reduced_asylum_is_refuted() {
    let o = folkit(&["asylum", "--subset", REDUCED, "prove"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("SZS status Unsatisfiable\n"), "{out}");
    let last = out.lines().last().unwrap();
    assert!(last.starts_with("0. $false [resolution "), "{last}");
}

#[test]
fn reports_are_deterministic() {
    let a = folkit(&["asylum", "--subset", REDUCED, "prove"]);
    let b = folkit(&["asylum", "--subset", REDUCED, "prove"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn figure_one_file_is_unsatisfiable_and_checks() {
    let path = corpus("fig1.p");
    let o = folkit(&["prove", path.to_str().unwrap(), "--check"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("SZS status Unsatisfiable\n"));
    assert!(out.ends_with("% check passed\n"), "{out}");
}

#[test]
fn empty_problem_has_a_one_element_model() {
    let dir = tempfile::tempdir().unwrap();
    let file = problem_file(&dir, "empty.p", "% nothing here\n");
    let o = folkit(&["model", &file]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "SZS status Satisfiable\ndomain size 1\n");
}

#[test]
fn malformed_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let file = problem_file(&dir, "bad.p", "fof(a, axiom, p(.\n");
    let o = folkit(&["prove", &file]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("bad.p: 1:"), "{err}");

    let o = folkit(&["prove", dir.path().join("missing.p").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    let o = folkit(&["asylum", "--subset", "ax4,ax13", "prove"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains("ax13"));

    let o = folkit(&["asylum", "prove", "--max-size", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn exhausted_limits_exit_with_one() {
    let o = folkit(&["asylum", "prove", "--time-limit", "1", "--max-size", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("SZS status Unknown\n"));
}

#[test]
fn conjectures_are_proved_or_countered() {
    let dir = tempfile::tempdir().unwrap();
    let theorem = problem_file(
        &dir,
        "t.p",
        "fof(h, axiom, ![X] : (doctor(X) => sane(X))).\n\
         fof(d, axiom, doctor(tarr)).\n\
         fof(c, conjecture, sane(tarr)).\n",
    );
    let o = folkit(&["prove", &theorem, "--check"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("SZS status Theorem\n"));
    assert!(out.ends_with("% check passed\n"));

    let counter = problem_file(&dir, "c.p", "fof(c, conjecture, sane(tarr)).\n");
    let o = folkit(&["prove", &counter, "--check"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "SZS status CounterSatisfiable\ndomain size 1\ntarr = 0\n% check passed\n"
    );
}

#[test]
fn witnesses_are_written_on_request() {
    let dir = tempfile::tempdir().unwrap();
    let proof = dir.path().join("proof.txt");
    let o = folkit(&[
        "asylum",
        "--subset",
        REDUCED,
        "prove",
        "--proof-out",
        proof.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let written = fs::read_to_string(&proof).unwrap();
    let out = stdout(&o);
    assert_eq!(
        out.strip_prefix("SZS status Unsatisfiable\n"),
        Some(written.as_str())
    );

    let model = dir.path().join("model.txt");
    let o = folkit(&[
        "asylum",
        "--subset",
        "ax4,ax5",
        "consistency",
        "--check",
        "--model-out",
        model.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let written = fs::read_to_string(&model).unwrap();
    assert!(written.starts_with("domain size "));
    assert!(stdout(&o).contains(&written));
}

#[test]
fn mus_of_a_small_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = problem_file(
        &dir,
        "m.p",
        "fof(a, axiom, p). fof(b, axiom, ~p). fof(c, axiom, q).\n",
    );
    let o = folkit(&["mus", &file, "--check"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(
        out.starts_with(
            "SZS status Unsatisfiable\ncore: a, b\n\
             without a: Satisfiable, model of size 1\n\
             without b: Satisfiable, model of size 1\n"
        ),
        "{out}"
    );
    assert_eq!(out.matches("% check passed").count(), 3);

    let sat = problem_file(&dir, "s.p", "fof(a, axiom, p).\n");
    let o = folkit(&["mus", &sat]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("SZS status Satisfiable\n"));
}
