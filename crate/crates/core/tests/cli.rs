//! End-to-end runs of the `hintcolor` binary.

use std::path::Path;
use std::process::{Command, Output};

use hintcolor::dataset::{fixtures::fixture_seed, generate_fixture, FixtureParams};
use hintcolor::{divide_blend, load_png, save_png, HintSet, RasterImage};

fn hintcolor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hintcolor"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn path(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

fn write_fixture(dir: &Path, name: &str, index: u64) -> std::path::PathBuf {
    let p = dir.join(name);
    save_png(&generate_fixture(fixture_seed(31, index), &FixtureParams::default()), &p).unwrap();
    p
}

#[test]
fn argument_errors_exit_2() {
    assert_eq!(code(&hintcolor(&[])), 2);
    assert_eq!(code(&hintcolor(&["lineart"])), 2);
    assert_eq!(code(&hintcolor(&["pipeline", "x.png", "--no-such-flag"])), 2);
    assert_eq!(code(&hintcolor(&["pipeline", "x.png", "--hint-k", "ten"])), 2);
}

#[test]
fn unreadable_input_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.png");
    let out = hintcolor(&["lineart", path(&missing), path(&dir.path().join("o.png"))]);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.png"));

    let garbage = dir.path().join("garbage.png");
    std::fs::write(&garbage, b"not a png").unwrap();
    assert_eq!(code(&hintcolor(&["lineart", path(&garbage), path(&dir.path().join("o.png"))])), 3);
}

#[test]
fn invalid_parameter_values_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_fixture(dir.path(), "in.png", 0);
    let out = hintcolor(&["pipeline", path(&input), "--out-dir", path(dir.path()), "--radius", "0"]);
    assert_eq!(code(&out), 2, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn help_lists_defaults() {
    let out = hintcolor(&["pipeline", "--help"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    for needle in ["--quant-k", "[default: 35]", "--hint-k", "[default: 10]", "--radius", "[default: 15]", "--seed"] {
        assert!(text.contains(needle), "help lacks {needle}:\n{text}");
    }
}

#[test]
fn pipeline_writes_artifacts_and_is_repeatable() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_fixture(dir.path(), "in.png", 1);
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    for out_dir in [&a, &b] {
        let out = hintcolor(&["pipeline", path(&input), "--out-dir", path(out_dir), "--seed", "5"]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }
    for name in ["lineart.png", "quantized.png", "hints.json", "composed.png"] {
        let first = std::fs::read(a.join(name)).unwrap();
        assert_eq!(first, std::fs::read(b.join(name)).unwrap(), "{name} differs between runs");
    }
    let hints = HintSet::load(a.join("hints.json")).unwrap();
    assert_eq!(hints.len(), 10);
    assert!(hints.hints.iter().all(|h| h.radius == 15));
    assert_eq!(load_png(a.join("composed.png")).unwrap().dimensions(), (256, 256));

    let out = hintcolor(&["pipeline", path(&input), "--out-dir", path(&c), "--hint-k", "30"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(HintSet::load(c.join("hints.json")).unwrap().len(), 30);
}

#[test]
fn stepwise_commands_chain() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_fixture(dir.path(), "in.png", 2);
    let d = |n: &str| dir.path().join(n);

    let out = hintcolor(&["lineart", path(&input), path(&d("line.png")), "--tolerance", "1.25"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let line = load_png(d("line.png")).unwrap();
    assert!(hintcolor::lineart::is_binary(&line));

    let out = hintcolor(&["hints", path(&input), "--hint-k", "4", "--out-quantized", path(&d("q.png"))]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let printed = HintSet::from_json(&String::from_utf8_lossy(&out.stdout)).expect("hints on stdout");
    assert_eq!(printed.len(), 4);
    std::fs::write(d("h.json"), printed.to_json()).unwrap();
    assert!(load_png(d("q.png")).unwrap().palette().len() <= 35);

    let out = hintcolor(&["compose", path(&d("line.png")), path(&d("h.json")), path(&d("composed.png"))]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(load_png(d("composed.png")).unwrap().dimensions(), line.dimensions());
}

#[test]
fn combine_matches_library_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let num = RasterImage::from_fn(40, 30, |x, y| [(x * 6) as u8, (y * 8) as u8, 200, 255]);
    let den = RasterImage::from_fn(40, 30, |x, y| [255 - (x * 3) as u8, 128, (y * 7) as u8, 255]);
    let (pn, pd, po, expected) = (
        dir.path().join("n.png"),
        dir.path().join("d.png"),
        dir.path().join("o.png"),
        dir.path().join("e.png"),
    );
    save_png(&num, &pn).unwrap();
    save_png(&den, &pd).unwrap();
    assert_eq!(code(&hintcolor(&["combine", path(&pn), path(&pd), path(&po)])), 0);
    save_png(&divide_blend(&num, &den).unwrap(), &expected).unwrap();
    assert_eq!(std::fs::read(&po).unwrap(), std::fs::read(&expected).unwrap());

    let small = dir.path().join("s.png");
    save_png(&RasterImage::new(2, 2, hintcolor::raster::WHITE), &small).unwrap();
    // mismatched sizes are an input problem, not an argument problem
    assert_eq!(code(&hintcolor(&["combine", path(&pn), path(&small), path(&po)])), 3);
}
