use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn scratch(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn fsel(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_fsel"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn fsel");
    {
        let mut handle = child.stdin.take().expect("stdin");
        if let Some(text) = stdin {
            let _ = handle.write_all(text.as_bytes());
        }
    }
    child.wait_with_output().expect("wait for fsel")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn parry_prints_theta_first() {
    let o = fsel(&["parry", &fixture("golden.mat")], None);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("theta 1.6180339887\n"));
    assert!(text.contains("pi 0.7236067977 0.2763932023"));
    assert!(text.contains("row 0.6180339887 0.3819660113"));
}

#[test]
fn stationary_recovers_pi() {
    let o = fsel(&["stationary", &fixture("golden.msr")], None);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("pi 0.7236067977 0.2763932023"));
}

#[test]
fn select_reads_standard_input() {
    let o = fsel(
        &["select", "--selector", &fixture("fig2.sel")],
        Some("01101\n"),
    );
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "10\n");
}

#[test]
fn freq_counts_champernowne_prefix() {
    let o = fsel(
        &["freq", "--k", "1", "--mode", "sliding"],
        Some("0100011011"),
    );
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "block,count,frequency\n0,5,0.5\n1,5,0.5\n");
}

#[test]
fn gen_matches_library_generators() {
    let o = fsel(&["gen", "--input", "champernowne", "--n", "10"], None);
    assert_eq!(stdout(&o), "0100011011\n");
    let o = fsel(
        &["gen", "--input", "sample", "--seed", "1", "--n", "8"],
        None,
    );
    assert_eq!(stdout(&o), "11100111\n");
}

#[test]
fn compat_reports_witness_and_violations() {
    let ok = fsel(
        &[
            "compat",
            "--selector",
            &fixture("fig3.sel"),
            "--measure",
            &fixture("golden.msr"),
        ],
        None,
    );
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).contains("state 011 iota 1 eta 1\n"));
    let bad = fsel(
        &[
            "compat",
            "--selector",
            &fixture("fig2.sel"),
            "--measure",
            &fixture("golden.msr"),
        ],
        None,
    );
    assert_eq!(bad.status.code(), Some(2));
    assert!(stdout(&bad).lines().all(|l| l.starts_with("VIOLATION ")));
}

#[test]
fn lemma_check_lines() {
    let o = fsel(
        &[
            "lemma-check",
            "--selector",
            &fixture("fig2.sel"),
            "--n",
            "3",
            "--w-max",
            "1",
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("LEMMA upper p=q0 n=2 w=1 value=1 bound=2 PASS\n"));
    let o = fsel(
        &[
            "lemma-check",
            "--selector",
            &fixture("fig2.sel"),
            "--lemma",
            "equirun",
            "--n",
            "20",
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn lemma_check_needs_strong_connectivity_for_equirun() {
    let o = fsel(
        &[
            "lemma-check",
            "--selector",
            &fixture("fig3.sel"),
            "--measure",
            &fixture("golden.msr"),
            "--lemma",
            "markov-equirun",
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn enumeration_cap_is_enforced() {
    let o = fsel(
        &[
            "lemma-check",
            "--selector",
            &fixture("fig2.sel"),
            "--n",
            "12",
            "--max-enum",
            "1024",
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("experiment"));
}

#[test]
fn chain_and_snake_use_measure_format() {
    let o = fsel(&["chain", "--selector", &fixture("fig1.sel")], None);
    assert_eq!(o.status.code(), Some(0));
    assert!(
        stdout(&o).starts_with("alphabet q0 q1 q2\npi 0.5000000000 0.2500000000 0.2500000000\n")
    );
    let o = fsel(
        &["snake", "--selector", &fixture("fig2.sel"), "--n", "2"],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("alphabet q0*00 q0*01"));
}

#[test]
fn experiment_exit_codes() {
    let pass_csv = scratch("pass.csv");
    let args = |tol: &str, out: &PathBuf| {
        vec![
            "experiment".to_string(),
            "--selector".into(),
            fixture("fig2.sel"),
            "--uniform".into(),
            "--n".into(),
            "100000".into(),
            "--seed".into(),
            "5".into(),
            "--tolerance".into(),
            tol.into(),
            "--out".into(),
            out.display().to_string(),
        ]
    };
    let run = |a: Vec<String>| {
        let refs: Vec<&str> = a.iter().map(String::as_str).collect();
        fsel(&refs, None)
    };

    let o = run(args("0.02", &pass_csv));
    assert_eq!(o.status.code(), Some(0));
    let first = std::fs::read_to_string(&pass_csv).unwrap();
    assert!(first.ends_with("# result=PASS\n"));
    assert!(first.contains("\nblock,count,frequency,target,abs_error\n"));
    run(args("0.02", &pass_csv));
    assert_eq!(std::fs::read_to_string(&pass_csv).unwrap(), first);

    let fail_csv = scratch("fail.csv");
    let o = run(args("1e-9", &fail_csv));
    assert_eq!(o.status.code(), Some(3));
    assert!(std::fs::read_to_string(&fail_csv)
        .unwrap()
        .ends_with("# result=FAIL\n"));

    let compat_csv = scratch("compat.csv");
    let o = fsel(
        &[
            "experiment",
            "--selector",
            &fixture("fig2.sel"),
            "--measure",
            &fixture("golden.msr"),
            "--out",
            compat_csv.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("P[1,1]=0"));
    assert!(std::fs::read_to_string(&compat_csv)
        .unwrap()
        .ends_with("# result=FAIL\n"));
}

#[test]
fn replicates_write_one_file_per_seed() {
    let out = scratch("rep.csv");
    let o = fsel(
        &[
            "experiment",
            "--selector",
            &fixture("fig2.sel"),
            "--n",
            "10000",
            "--seed",
            "10",
            "--replicates",
            "3",
            "--tolerance",
            "0.5",
            "--out",
            out.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    for seed in 10..13 {
        let text = std::fs::read_to_string(scratch(&format!("rep.csv.seed{seed}"))).unwrap();
        assert!(text.starts_with(&format!("# seed={seed}\n")));
    }
}

#[test]
fn parse_and_usage_failures_exit_one() {
    let bad = scratch("dup.sel");
    std::fs::write(
        &bad,
        "alphabet 0 1\nstates a\ninitial a\ntrans a 0 keep a\ntrans a 0 drop a\n",
    )
    .unwrap();
    let o = fsel(&["select", "--selector", bad.to_str().unwrap()], Some("0"));
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 5"));

    let rows = scratch("rows.msr");
    std::fs::write(&rows, "alphabet 0 1\npi 0.5 0.5\nrow 0.99 0\nrow 0.5 0.5\n").unwrap();
    let o = fsel(&["stationary", rows.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));

    assert_eq!(fsel(&["frobnicate"], None).status.code(), Some(1));
    assert_eq!(
        fsel(&["freq", "--k", "1", "--mode", "diagonal"], Some("01"))
            .status
            .code(),
        Some(1)
    );
    assert_eq!(fsel(&["--help"], None).status.code(), Some(0));
}

#[test]
fn experiment_guards_short_runs() {
    let o = fsel(
        &[
            "experiment",
            "--selector",
            &fixture("fig2.sel"),
            "--n",
            "50",
            "--k",
            "1",
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(2));
}
