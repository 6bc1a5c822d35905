//! Import and verification of the vendored published schemes.

use mmrank::io::import_published;
use mmrank::scheme::Ring;
use mmrank::Format;

fn fixture(name: &str) -> String {
    let path = format!(
        "{}/tests/fixtures/published/{name}",
        env!("CARGO_MANIFEST_DIR")
    );
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("missing fixture {path}: {e}"))
}

fn check(name: &str, format: (usize, usize, usize), rank: usize) {
    let imported = import_published(&fixture(name), None)
        .unwrap_or_else(|e| panic!("{name}: import failed: {e}"));
    let s = &imported.scheme;
    assert!(s.verify(), "{name}: imported scheme does not verify");
    assert_eq!(
        s.format(),
        Format::new(format.0, format.1, format.2).unwrap(),
        "{name}: wrong canonical format"
    );
    assert_eq!(s.rank(), rank, "{name}: wrong rank");
}

#[test]
fn corpus_455_rank_76() {
    check("455-76.exp", (4, 5, 5), 76);
}

#[test]
fn corpus_456_rank_90() {
    check("456-90.exp", (4, 5, 6), 90);
}

#[test]
fn corpus_457_rank_104() {
    check("457-104.exp", (4, 5, 7), 104);
}

#[test]
fn corpus_556_rank_110() {
    check("556-110.exp", (5, 5, 6), 110);
}

#[test]
fn corpus_467_rank_123() {
    check("467-123.exp", (4, 6, 7), 123);
}

#[test]
fn corpus_557_rank_127() {
    check("557-127.exp", (5, 5, 7), 127);
}

#[test]
fn corpus_566_rank_130() {
    check("566-130.exp", (5, 6, 6), 130);
}

#[test]
fn corpus_477_rank_144() {
    check("477-144.exp", (4, 7, 7), 144);
}

#[test]
fn corpus_567_rank_150() {
    check("567-150.exp", (5, 6, 7), 150);
}

#[test]
fn corpus_577_rank_176() {
    check("577-176.exp", (5, 7, 7), 176);
}

#[test]
fn corpus_667_rank_183() {
    check("667-183.exp", (6, 6, 7), 183);
}

#[test]
fn corpus_555_rank_93() {
    check("555-93.exp", (5, 5, 5), 93);
}

#[test]
fn corpus_666_rank_153() {
    check("666-153.exp", (6, 6, 6), 153);
}

/// Restricting the published (6,6,6) scheme to (5,6,6) keeps it correct;
/// the surviving rank is recorded, not asserted.
#[test]
fn restricting_666_gives_correct_566_scheme() {
    let imported = import_published(&fixture("666-153.exp"), None).unwrap();
    let target = Format::new(5, 6, 6).unwrap();
    let selector = mmrank::morph::Selector::prefix(target);
    let restricted = imported.scheme.restrict(target, &selector).unwrap();
    assert!(restricted.rank() <= 153);
    assert!(restricted.verify(), "restricted scheme must stay correct");
    println!(
        "(6,6,6) rank 153 restricted to (5,6,6): rank {}",
        restricted.rank()
    );
}

#[test]
fn strassen_fixture_verifies_with_rank_7() {
    let path = format!(
        "{}/tests/fixtures/strassen_222.exp",
        env!("CARGO_MANIFEST_DIR")
    );
    let text = std::fs::read_to_string(path).unwrap();
    let imported = import_published(&text, None).unwrap();
    assert_eq!(imported.scheme.rank(), 7);
    assert_eq!(imported.scheme.ring(), Ring::Integer);
    assert!(imported.scheme.verify());
}
