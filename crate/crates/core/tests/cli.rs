use std::fs;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_groupcount")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const COUNT_1000: &str = "x,cyclic,strictly_abelian,strictly_nilpotent,not_nilpotent,total
10,5,2,1,2,10
100,37,6,6,51,100
1000,325,40,21,614,1000
";

#[test]
fn classify_prints_class_phi_psi() {
    let o = run(&["classify", "1", "8", "45", "6", "97"]);
    assert!(o.status.success());
    assert_eq!(
        stdout(&o),
        "1,cyclic,1,1\n8,strictly_nilpotent,4,21\n45,strictly_abelian,24,64\n6,not_nilpotent,2,2\n97,cyclic,96,96\n"
    );
}

#[test]
fn count_modes_agree() {
    let seq = run(&["count", "--limit", "1000", "--sequential"]);
    assert!(seq.status.success());
    assert_eq!(stdout(&seq), COUNT_1000);
    for extra in [&["--threads", "3", "--segment-size", "7"][..], &["--segment-size", "1"], &[]] {
        let mut args = vec!["count", "--limit", "1e3"];
        args.extend_from_slice(extra);
        assert_eq!(stdout(&run(&args)), COUNT_1000, "{extra:?}");
    }
    let o = run(&["count", "--limit", "10^3", "--checkpoints", "500,250"]);
    let text = stdout(&o);
    assert!(text.contains("\n250,") && text.contains("\n500,"), "{text}");
    assert_eq!(text.lines().count(), 6);
}

#[test]
fn count_out_and_resume() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("counts.csv");
    let out_s = out.to_str().unwrap();
    let o = run(&["count", "--limit", "100", "--out", out_s]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("# checkpoint 100"));
    let partial = fs::read_to_string(&out).unwrap();
    assert_eq!(partial, COUNT_1000.lines().take(3).map(|l| format!("{l}\n")).collect::<String>());

    let o = run(&["count", "--limit", "1000", "--resume", out_s, "--out", out_s]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read_to_string(&out).unwrap(), COUNT_1000);
    assert!(!dir.path().read_dir().unwrap().any(|e| e.unwrap().file_name().to_string_lossy().ends_with(".tmp")));
}

#[test]
fn coeffs_d_notes_unweighted_form() {
    let o = run(&["coeffs", "--family", "d", "--order", "2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("2,d,-3*gamma + 3*gamma^2 + 1/4*pi^2,1.73528787699089709584421488879\n"));
    assert!(text.contains("# d_2 without the j! weight would be -2*gamma + 5/2*gamma^2 + 1/6*pi^2 = 1.32344754656445740105533132737"));
    let o = run(&["coeffs", "--family", "C", "--order", "2", "--digits", "10"]);
    assert_eq!(stdout(&o).lines().nth(3), Some("2,C,1/2*gamma^2 + 1/12*pi^2,0.9890559953"));
}

#[test]
fn estimate_and_compare() {
    let o = run(&["estimate", "--which", "cyclic", "--x", "1e9", "--order", "2"]);
    assert!(o.status.success());
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!((v - 718_512_849.093_063_1).abs() < 1e-3);

    let o = run(&["compare", "--limit", "1e4", "--order", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("check,param,observed,predicted,ratio,order,residual,pass"));
    assert_eq!(text.lines().count(), 1 + 4 * 3);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",report")));
    assert!(text.contains("compare_cyclic,x=10000,3114,"));
}

#[test]
fn compare_from_saved_counts() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.csv");
    fs::write(&path, COUNT_1000).unwrap();
    let o = run(&["compare", "--limit", "1000", "--from", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 1 + 3 * 3);
    let o = run(&["compare", "--limit", "10000", "--from", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn check_suites_exit_codes() {
    let o = run(&["check", "--suite", "tau", "--lambda", "1e4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().skip(1).all(|l| l.ends_with(",report")));
    assert_eq!(run(&["check", "--suite", "d2"]).status.code(), Some(0));
    let o = run(&["check", "--suite", "mertens", "--z", "1e6"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 1 + 2);
    // the window-domain integral criterion is not met at L = 15
    let o = run(&["check", "--suite", "integral", "--L", "15"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains(",false"));
}

#[test]
fn error_exit_codes() {
    let cases: &[(&[&str], i32)] = &[
        (&["count", "--limit", "0"], 2),
        (&["count", "--limit", "100", "--checkpoints", "500"], 2),
        (&["coeffs", "--family", "x"], 2),
        (&["coeffs", "--family", "b", "--order", "13"], 2),
        (&["estimate", "--which", "cyclic", "--x", "2"], 2),
        (&["frobnicate"], 2),
        (&["coeffs", "--family", "b", "--digits", "80"], 3),
        (&["count", "--limit", "100", "--out", "/nonexistent/dir/x.csv"], 3),
        (&["count", "--limit", "100", "--resume", "/nonexistent/x.csv"], 3),
    ];
    for (args, code) in cases {
        let o = run(args);
        assert_eq!(o.status.code(), Some(*code), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!o.stderr.is_empty());
    }
}
