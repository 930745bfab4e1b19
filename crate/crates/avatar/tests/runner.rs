use std::io::Write;

use avatar::{compare_zeros, load_zeros, run_parallel, AvatarError, Config, ZeroSource};
use avatar_core::eta_engine::EtaContext;
use avatar_core::treepath::find_c;
use avatar_core::zeta::{find_zeros, ZetaError};
use tempfile::NamedTempFile;

fn file_with(text: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn loads_two_zeros() {
    let f = file_with("14.134725\n21.022040\n");
    let z = load_zeros(f.path()).unwrap();
    assert_eq!(z.len(), 2);
    assert_eq!(z.get(2), Some(21.02204));
}

#[test]
fn comments_and_blank_lines_are_skipped() {
    let f = file_with("# header\n\n14.134725  # first\n   \n21.022040\n");
    assert_eq!(load_zeros(f.path()).unwrap().len(), 2);
}

#[test]
fn decreasing_entries_are_rejected() {
    let f = file_with("21.022040\n14.134725\n");
    match load_zeros(f.path()) {
        Err(AvatarError::ZeroFile {
            source: ZetaError::Monotonicity { line, .. },
            ..
        }) => assert_eq!(line, 2),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn garbage_reports_its_line() {
    let f = file_with("14.134725\n# ok\nabc\n");
    match load_zeros(f.path()) {
        Err(AvatarError::ZeroFile {
            source: ZetaError::Parse { line, .. },
            ..
        }) => assert_eq!(line, 3),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn missing_file_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let err = load_zeros(dir.path().join("nope.txt")).unwrap_err();
    assert!(matches!(err, AvatarError::Io { .. }));
}

#[test]
fn bundled_reference_agrees_with_computed_zeros() {
    let reference = load_zeros(concat!(env!("CARGO_MANIFEST_DIR"), "/data/zeros_320.txt")).unwrap();
    assert_eq!(reference.len(), 320);
    let computed = find_zeros(30).unwrap();
    let cmp = compare_zeros(&computed, &reference);
    assert_eq!(cmp.compared, 30);
    assert!(cmp.max_deviation < 1e-6, "{cmp:?}");
}

#[test]
fn short_zero_file_is_rejected_by_config() {
    let f = file_with("14.134725\n21.022040\n");
    let cfg = Config {
        zeros: ZeroSource::File(f.path().to_path_buf()),
        ..Config::default()
    };
    assert!(matches!(
        cfg.zeros(5),
        Err(AvatarError::TooFewZeros {
            needed: 5,
            available: 2
        })
    ));
}

#[test]
fn parallel_run_matches_next_zero() {
    let cfg = Config::default();
    let theta = find_c(&EtaContext::new()).unwrap().theta;
    let zeros = cfg.zeros(5).unwrap();
    let run = run_parallel(&cfg, theta, &zeros, 4, false).unwrap();
    assert_eq!(run.traces.len(), 4);
    assert_eq!(run.summary().successes(), 4);
    let ms: Vec<usize> = run.traces.iter().map(|t| t.entry.m).collect();
    assert_eq!(ms, [1, 2, 3, 4]);
    assert!(run.scan.max_modulus < cfg.pole_cap);
}

#[test]
fn empty_run_and_too_few_zeros() {
    let cfg = Config::default();
    let theta = find_c(&EtaContext::new()).unwrap().theta;
    let zeros = find_zeros(3).unwrap();
    let empty = run_parallel(&cfg, theta, &zeros, 0, false).unwrap();
    assert!(empty.traces.is_empty());
    assert_eq!(empty.summary().successes(), 0);
    assert!(matches!(
        run_parallel(&cfg, theta, &zeros, 3, false),
        Err(AvatarError::TooFewZeros { .. })
    ));
}
