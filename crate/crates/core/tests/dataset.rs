//! Dataset trees, manifests, and validation.

use std::path::Path;

use hintcolor::dataset::{
    validate_manifest, BuildOptions, DatasetManifest, EntryStatus, Layout, Split, ViolationKind, MANIFEST_FILE,
};
use hintcolor::{build_dataset, generate_fixtures, load_png, Error};

/// Small images keep the clustering cheap; the layout logic is the same.
const SIDE: u32 = 96;

fn sources(dir: &Path, count: usize) {
    generate_fixtures(dir, count, 17).unwrap();
}

fn options(layout: Layout) -> BuildOptions {
    BuildOptions {
        layout,
        side: SIDE,
        ..BuildOptions::default()
    }
}

fn count_png(dir: &Path) -> usize {
    std::fs::read_dir(dir)
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "png"))
        .count()
}

#[test]
fn aligned_split_and_pairs() {
    let work = tempfile::tempdir().unwrap();
    let (src, out) = (work.path().join("src"), work.path().join("out"));
    sources(&src, 10);
    std::fs::write(src.join("fixture_003.txt"), "drawn by a test\n").unwrap();

    let manifest = build_dataset(&src, &out, &options(Layout::Aligned)).unwrap();
    assert_eq!(manifest.count(Split::Train), 9);
    assert_eq!(manifest.count(Split::Test), 1);
    assert_eq!((count_png(&out.join("train")), count_png(&out.join("test"))), (9, 1));
    assert_eq!(count_png(&out.join("lineart")), 10);

    let ids: Vec<&str> = manifest.entries.iter().map(|e| e.id.as_str()).collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);

    let entry = manifest.entries.iter().find(|e| e.id == "fixture_003").unwrap();
    assert_eq!(entry.attribution, "drawn by a test");
    let pair = load_png(out.join(entry.pair_path.as_ref().unwrap())).unwrap();
    assert_eq!(pair.dimensions(), (2 * SIDE, SIDE));

    assert_eq!(DatasetManifest::load(&out.join(MANIFEST_FILE)).unwrap(), manifest);
    assert_eq!(validate_manifest(out.join(MANIFEST_FILE)).unwrap(), vec![]);
}

#[test]
fn unpaired_domains_match() {
    let work = tempfile::tempdir().unwrap();
    let (src, out) = (work.path().join("src"), work.path().join("out"));
    sources(&src, 6);
    let opts = BuildOptions {
        split: 0.5,
        ..options(Layout::Unpaired)
    };
    build_dataset(&src, &out, &opts).unwrap();
    let n = |d: &str| count_png(&out.join(d));
    assert_eq!((n("trainA"), n("trainB"), n("testA"), n("testB")), (3, 3, 3, 3));
    assert!(!out.join("train").exists());
    assert_eq!(validate_manifest(out.join(MANIFEST_FILE)).unwrap(), vec![]);
}

#[test]
fn unreadable_sources_are_skipped_not_fatal() {
    let work = tempfile::tempdir().unwrap();
    let (src, out) = (work.path().join("src"), work.path().join("out"));
    sources(&src, 3);
    std::fs::write(src.join("broken.png"), b"\x89PNG but not really").unwrap();

    let manifest = build_dataset(&src, &out, &options(Layout::Aligned)).unwrap();
    let broken = manifest.entries.iter().find(|e| e.id == "broken").unwrap();
    assert_eq!(broken.status, EntryStatus::Skipped);
    assert!(broken.reason.is_some());
    assert_eq!(broken.split, None);
    assert_eq!(manifest.ok_entries().count(), 3);
    assert_eq!(validate_manifest(out.join(MANIFEST_FILE)).unwrap(), vec![]);
}

#[test]
fn validation_finds_damage() {
    let work = tempfile::tempdir().unwrap();
    let (src, out) = (work.path().join("src"), work.path().join("out"));
    sources(&src, 4);
    let manifest = build_dataset(&src, &out, &options(Layout::Aligned)).unwrap();
    let manifest_path = out.join(MANIFEST_FILE);

    let victim = &manifest.entries[1];
    std::fs::remove_file(out.join(victim.target_path.as_ref().unwrap())).unwrap();
    let text = std::fs::read_to_string(&manifest_path).unwrap();
    let duplicate = text.lines().nth(1).unwrap().to_owned();
    std::fs::write(&manifest_path, format!("{text}{duplicate}\n")).unwrap();

    let violations = validate_manifest(&manifest_path).unwrap();
    assert!(violations
        .iter()
        .any(|v| v.kind == ViolationKind::MissingFile && v.id.as_deref() == Some(victim.id.as_str())));
    assert!(violations
        .iter()
        .any(|v| v.kind == ViolationKind::DuplicateId && v.id.as_deref() == Some(manifest.entries[0].id.as_str())));

    let cli = std::process::Command::new(env!("CARGO_BIN_EXE_hintcolor"))
        .args(["dataset", "validate", manifest_path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(cli.status.code(), Some(1));
    let printed: serde_json::Value = serde_json::from_slice(&cli.stdout).unwrap();
    assert!(printed.as_array().is_some_and(|a| !a.is_empty()), "{printed}");
}

#[test]
fn refuses_non_empty_output() {
    let work = tempfile::tempdir().unwrap();
    let (src, out) = (work.path().join("src"), work.path().join("out"));
    sources(&src, 1);
    std::fs::create_dir(&out).unwrap();
    std::fs::write(out.join("keep.txt"), "x").unwrap();
    assert!(matches!(
        build_dataset(&src, &out, &options(Layout::Aligned)),
        Err(Error::InvalidParameter { .. })
    ));
}
