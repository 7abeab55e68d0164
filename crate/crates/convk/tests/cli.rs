use std::fs;
use std::path::Path;
use std::process::{Command, Output, Stdio};
use std::io::Write;

const BIN: &str = env!("CARGO_BIN_EXE_convk");
const SUBCOMMANDS: [&str; 6] = ["encode", "decode", "sweep", "search", "analyze", "trellis-dump"];

fn convk(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn convk_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child = Command::new(BIN)
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn help_text_matches_golden_files() {
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let mut pages: Vec<(String, Vec<&str>)> = vec![("convk".into(), vec!["--help"])];
    pages.extend(SUBCOMMANDS.iter().map(|s| (s.to_string(), vec![*s, "--help"])));
    for (name, args) in pages {
        let out = convk(&args);
        assert_eq!(out.status.code(), Some(0));
        let text = stdout(&out);
        let path = golden.join(format!("{}.txt", name));
        if update {
            fs::write(&path, &text).unwrap();
        }
        let expected = fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing {}", path.display()));
        assert_eq!(text, expected, "help for {} changed; rerun with UPDATE_GOLDEN=1", name);
    }
}

#[test]
fn help_documents_every_flag() {
    use clap::CommandFactory;
    let cmd = convk::cli::Cli::command();
    for sub in cmd.get_subcommands() {
        let help = stdout(&convk(&[sub.get_name(), "--help"]));
        for arg in sub.get_arguments() {
            if let Some(long) = arg.get_long() {
                assert!(help.contains(&format!("--{}", long)), "{} --{}", sub.get_name(), long);
                assert!(arg.get_help().is_some(), "{} --{} has no help", sub.get_name(), long);
            }
        }
    }
}

#[test]
fn encode_decode_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let msg = dir.path().join("msg.bin");
    let payload: Vec<u8> = (0..=255u8).chain(b"convolutional".iter().copied()).collect();
    fs::write(&msg, &payload).unwrap();
    for (code, puncture) in [("3:1/2:7,5", None), ("7:1/2:171,133", Some("p=110/101")), ("5:1/3:25,33,37", None)] {
        let coded = dir.path().join("coded.cvk");
        let back = dir.path().join("back.bin");
        let mut enc = vec!["encode", "--code", code, "-i", msg.to_str().unwrap(), "-o", coded.to_str().unwrap()];
        let mut dec = vec!["decode", "--code", code, "-i", coded.to_str().unwrap(), "-o", back.to_str().unwrap()];
        if let Some(p) = puncture {
            enc.extend(["--puncture", p]);
            dec.extend(["--puncture", p]);
        }
        assert_eq!(convk(&enc).status.code(), Some(0));
        let header = fs::read(&coded).unwrap();
        assert_eq!(&header[..4], b"CVK1");
        assert_eq!(u64::from_le_bytes(header[8..16].try_into().unwrap()), payload.len() as u64 * 8);
        for algo in ["viterbi-hard", "viterbi-soft", "bcjr-logmap", "bcjr-maxlog", "bcjr", "stream"] {
            let mut args = dec.clone();
            args.extend(["--algo", algo]);
            assert_eq!(convk(&args).status.code(), Some(0), "{} {}", code, algo);
            assert_eq!(fs::read(&back).unwrap(), payload, "{} {}", code, algo);
        }
    }
}

#[test]
fn round_trip_through_pipes_and_noisy_channel() {
    let msg: Vec<u8> = (0..200u32).map(|i| (i * 37 % 251) as u8).collect();
    let code = "7:1/2:171,133";
    let coded = convk_stdin(&["encode", "--code", code, "--channel", "awgn", "--ebno-db", "6", "--seed", "5"], &msg);
    assert_eq!(coded.status.code(), Some(0));
    assert_eq!(coded.stdout[7], 1, "LLR payload");
    let again = convk_stdin(&["encode", "--code", code, "--channel", "awgn", "--ebno-db", "6", "--seed", "5"], &msg);
    assert_eq!(coded.stdout, again.stdout);
    let decoded = convk_stdin(&["decode", "--code", code, "--algo", "bcjr"], &coded.stdout);
    assert_eq!(decoded.stdout, msg);

    let bsc = convk_stdin(&["encode", "--code", code, "--channel", "bsc", "--bsc-p", "0.01", "--seed", "2"], &msg);
    assert_eq!(bsc.stdout[7], 0, "bit payload");
    let decoded = convk_stdin(&["decode", "--code", code, "--algo", "viterbi-hard"], &bsc.stdout);
    assert_eq!(decoded.stdout, msg);
}

#[test]
fn unterminated_stream() {
    let msg = vec![0xA5u8; 64];
    let code = "5:1/2:31,27";
    let coded = convk_stdin(&["encode", "--code", code, "--unterminated"], &msg);
    assert_eq!(coded.stdout[6], 0);
    let back = convk_stdin(&["decode", "--code", code, "--algo", "stream", "--window", "25"], &coded.stdout);
    assert_eq!(back.stdout, msg);
    let back = convk_stdin(&["decode", "--code", code, "--algo", "viterbi-soft"], &coded.stdout);
    assert_eq!(back.stdout, msg);
    let map = convk_stdin(&["decode", "--code", code, "--algo", "bcjr"], &coded.stdout);
    assert_eq!(map.status.code(), Some(2));
}

#[test]
fn exit_codes() {
    assert_eq!(convk(&[]).status.code(), Some(1));
    assert_eq!(convk(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(convk(&["analyze"]).status.code(), Some(1));
    assert_eq!(convk(&["analyze", "--code", "3:1/2:7,5", "--span", "x"]).status.code(), Some(1));
    assert_eq!(convk(&["--version"]).status.code(), Some(0));

    let bad_code = convk(&["analyze", "--code", "3:1/2:9,5"]);
    assert_eq!(bad_code.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad_code.stderr).contains("error"));
    assert_eq!(convk(&["search", "--k", "12"]).status.code(), Some(2));
    assert_eq!(convk_stdin(&["decode", "--code", "3:1/2:7,5"], b"garbage").status.code(), Some(2));
    assert_eq!(convk_stdin(&["encode", "--code", "3:1/2:7,5"], b"").status.code(), Some(2));
    assert_eq!(convk(&["sweep", "--max-bits", "10"]).status.code(), Some(2));
    assert_eq!(convk(&["sweep", "--k", "3", "--set", "colour=blue"]).status.code(), Some(2));
    assert_eq!(convk(&["sweep", "--preset", "nope"]).status.code(), Some(1));
    let mismatch = convk_stdin(&["encode", "--code", "7:1/2:171,133"], b"x");
    assert_eq!(convk_stdin(&["decode", "--code", "3:1/2:7,5"], &mismatch.stdout).status.code(), Some(2));
}

#[test]
fn analyze_and_dump() {
    let out = convk(&["analyze", "--code", "3:1/2:7,5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("d_free=5\n"), "{}", text);
    assert!(text.contains("states=4\n"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("code=3:1/2:7,5"));
    let k7 = stdout(&convk(&["analyze", "--code", "7:1/2:171,133"]));
    assert!(k7.contains("d_free=10\n") && k7.contains("spectrum=11;0;38;0;193\n"), "{}", k7);
    let cat = stdout(&convk(&["analyze", "--code", "3:1/2:6,5"]));
    assert!(cat.contains("catastrophic=yes\ncommon_factor=1+D\n"), "{}", cat);

    let dump = stdout(&convk(&["trellis-dump", "--code", "3:1/2:7,5"]));
    let lines: Vec<&str> = dump.lines().collect();
    assert_eq!(lines[0], "state,input,next_state,output_bits");
    assert_eq!(lines.len(), 9);
    assert!(lines.contains(&"00,1,10,11"));
}

#[test]
fn search_csv() {
    let out = stdout(&convk(&["search", "--k", "3"]));
    let mut lines = out.lines();
    assert_eq!(lines.next().unwrap(), "k,g1_octal,g2_octal,d_free,spectrum_counts,catastrophic_excluded_count");
    assert_eq!(lines.next().unwrap(), "3,7,5,5,1;2;4;8;16,0");
    let top = stdout(&convk(&["search", "--k", "7", "--top", "2"]));
    assert_eq!(top.lines().count(), 3);
    assert!(top.lines().nth(1).unwrap().starts_with("7,155,117,10,11;"));
}

#[test]
fn sweep_writes_csv_and_plot_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("plan.txt");
    fs::write(
        &plan,
        "# small mixed plan\ncodes=3;5+p=110/101;uncoded\ndecoders=viterbi-soft,bcjr-maxlog\nebno_db=1:3:1\nmax_bits=20000\nblock_len=256\n",
    )
    .unwrap();
    let csv = |workers: &str, name: &str| {
        let out = dir.path().join(name);
        let o = convk(&["sweep", "--plan", plan.to_str().unwrap(), "--seed", "11", "--workers", workers, "-o", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let log = String::from_utf8_lossy(&o.stderr).to_string();
        assert!(log.contains("seed=11") && log.contains("block_len=256"), "{}", log);
        fs::read_to_string(out).unwrap()
    };
    let a = csv("1", "a.csv");
    let b = csv("6", "b.csv");
    assert_eq!(a, b);
    // 2 coded schemes x 2 decoders x 3 points + uncoded x 3
    assert_eq!(a.lines().count(), 1 + 15);
    let plot = fs::read_to_string(dir.path().join("a.plot.csv")).unwrap();
    assert!(plot.starts_with("series,ebno_db,ber,ci_low,ci_high\n"));
    assert_eq!(plot.lines().count(), 16);

    // flags win over the plan file
    let o = convk(&["sweep", "--plan", plan.to_str().unwrap(), "--ebno-db", "2", "--codes", "uncoded"]);
    assert_eq!(stdout(&o).lines().count(), 2);
}
