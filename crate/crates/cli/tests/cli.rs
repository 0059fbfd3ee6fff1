use std::path::Path;

use zeroclass_cli::report::Report;
use zeroclass_cli::run;

fn zc(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("zeroclass").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn value<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    text.lines().find_map(|l| l.strip_prefix(key)?.strip_prefix(" = "))
}

#[test]
fn verify_example_matches_golden() {
    let (code, out, _) = zc(&["verify-paper-example"]);
    assert_eq!(code, 0);
    assert_eq!(out, include_str!("golden/verify-paper-example.txt"));
    assert_eq!(value(&out, "clot.witness"), Some("s(x1,y1) at s(a,1) = a"));
    assert_eq!(value(&out, "certificates"), Some("0"));
    assert_eq!(value(&out, "ideal.certificate.b.size"), Some("2"));
}

#[test]
fn tasks_match_golden_in_declaration_order() {
    let (code, out, _) = zc(&["tasks"]);
    assert_eq!(code, 0);
    assert_eq!(out, include_str!("golden/tasks.txt"));
    let titles: Vec<&str> = out.lines().filter(|l| l.starts_with("[task")).collect();
    assert!(titles[0].contains("classify A C --variety V]"));
    assert!(titles.last().unwrap().contains("abelianize Z3"));
}

#[test]
fn classify_normal_subgroup_is_all_yes() {
    let (code, out, _) = zc(&["classify", "Z4", "{0,2}", "--variety", "V(Z4)"]);
    assert_eq!(code, 0);
    for key in ["subuniverse", "normal", "kernel", "clot"] {
        assert_eq!(value(&out, key), Some("yes"), "{key}");
    }
    assert_eq!(value(&out, "ideal"), Some("certified"));
}

#[test]
fn classify_non_subuniverse_reports_escape() {
    let (code, out, _) = zc(&["classify", "Z4", "{0,1}"]);
    assert_eq!(code, 0);
    assert_eq!(value(&out, "subuniverse"), Some("no"));
    assert_eq!(value(&out, "subuniverse.escape"), Some("+(1,1) = 2"));
    assert_eq!(value(&out, "ideal"), Some("not-a-subuniverse"));
}

#[test]
fn maltsev_for_z2_is_x_plus_y_plus_z() {
    let (code, out, _) = zc(&["maltsev", "--variety", "V(Z2group)"]);
    assert_eq!(code, 0);
    assert_eq!(value(&out, "maltsev"), Some("found"));
    assert_eq!(value(&out, "term"), Some("(x+y)+z"));
}

#[test]
fn normalise_agrees_with_zero_class() {
    let (_, a, _) = zc(&["zero-class", "Z4", "Z4_mod2"]);
    let (_, b, _) = zc(&["normalise", "Z4", "Z4_mod2"]);
    assert_eq!(value(&a, "zero_class"), value(&b, "normalisation"));
    assert_eq!(value(&b, "agree"), Some("yes"));
}

#[test]
fn smith_conflict_prints_derivations() {
    let (code, out, _) = zc(&["commute-smith", "S3", "{(e,t01)}", "{(e,r)}"]);
    assert_eq!(code, 0);
    assert_eq!(value(&out, "status"), Some("none"));
    assert!(value(&out, "derivation.1").is_some());
    assert!(value(&out, "derivation.2").is_some());
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(zc(&["no-such-command"]).0, 1);
    assert_eq!(zc(&["classify"]).0, 1);
    assert_eq!(zc(&[]).0, 1);
    assert_eq!(zc(&["--help"]).0, 0);
}

#[test]
fn validation_errors_exit_2() {
    let (code, _, err) = zc(&["classify", "Nope", "C"]);
    assert_eq!(code, 2);
    assert!(err.contains("Nope"));
    assert_eq!(
        zc(&[
            "commute-smith",
            "Z4",
            "Z4_mod2",
            "{(0,1)}",
            "--workspace",
            "/no/such/file"
        ])
        .0,
        2
    );
    assert_eq!(zc(&["construct-leftsplit", "A", "C", "{}"]).0, 2);
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.display().to_string()
}

#[test]
fn bad_table_length_names_the_op() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "bad.alg",
        "algebra B\nsize 2\nop m 2\ntable m\n0 1 1\nsubset S of B = {0}\n",
    );
    let (code, _, err) = zc(&["subalgebras", "B", "--workspace", &path]);
    assert_eq!(code, 2);
    assert!(err.contains("`m`") || err.contains(" m"), "{err}");
    assert!(err.contains("line"), "{err}");
}

#[test]
fn empty_workspace_has_no_names() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "empty.alg", "");
    assert_eq!(zc(&["subalgebras", "A", "--workspace", &path]).0, 2);
    let (code, out, _) = zc(&["tasks", "--workspace", &path]);
    assert_eq!((code, out.as_str()), (0, ""));
}

#[test]
fn strict_turns_unknown_into_exit_3() {
    let args = ["classify", "A", "C", "--variety", "V", "--depth", "1", "--pool", "A"];
    let (code, out, _) = zc(&args);
    assert_eq!(code, 0);
    assert_eq!(value(&out, "ideal"), Some("unknown"));
    let mut strict = args.to_vec();
    strict.push("--strict");
    assert_eq!(zc(&strict).0, 3);
}

#[test]
fn json_reports_replay_and_tampering_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json").display().to_string();
    let (code, text, _) = zc(&["tasks", "--json", &json]);
    assert_eq!(code, 0);
    let report: Report = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(report.text(), text);
    assert!(!report.artifacts.is_empty());

    let (code, out, _) = zc(&["--replay", &json]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(value(&out, "failed"), Some("0"));

    let raw = std::fs::read_to_string(&json).unwrap();
    let tampered = raw.replacen("\"value\": 2", "\"value\": 1", 1);
    assert_ne!(raw, tampered);
    let bad = write(dir.path(), "bad.json", &tampered);
    let (code, out, _) = zc(&["--replay", &bad]);
    assert_eq!(code, 4, "{out}");
    assert_eq!(value(&out, "failed"), Some("1"));
}

#[test]
fn json_to_stdout() {
    let (code, out, _) = zc(&["abelianize", "Z3", "--json", "-"]);
    assert_eq!(code, 0);
    let report: Report = serde_json::from_str(&out).unwrap();
    assert_eq!(report.get("abelian"), Some("yes"));
}

#[test]
fn construct_commands() {
    let (code, out, _) = zc(&["construct-T", "Z4_mod2"]);
    assert_eq!(code, 0);
    assert_eq!(value(&out, "kernel.clot"), Some("yes"));
    assert_eq!(value(&out, "image"), value(&out, "zero_class"));
    let (code, out, _) = zc(&["construct-leftsplit", "Z4", "Z4_2", "{(0,2)}"]);
    assert_eq!(code, 0);
    assert_eq!(value(&out, "surjective"), Some("yes"));
    assert_eq!(value(&out, "zero_class"), value(&out, "image_of_clot"));
}

#[test]
fn span_commands() {
    let (code, out, _) = zc(&["commute-leftsplit", "pa", "ia", "pb", "pb", "ib", "pa"]);
    assert_eq!(code, 0);
    assert_eq!(value(&out, "status"), Some("found"));
    let (code, out, _) = zc(&["pt-instance", "pa,ia,pb,pb,ib,pa"]);
    assert_eq!(code, 0);
    assert_eq!(value(&out, "reflection_fails"), Some("no"));
    assert_eq!(zc(&["pt-instance", "pa,ia"]).0, 2);
    assert_eq!(zc(&["commute-leftsplit", "pa", "ib", "pb", "pb", "ib", "pa"]).0, 2);
}
