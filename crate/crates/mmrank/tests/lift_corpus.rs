//! Lifting behavior on real search products: a searched (2,2,2) scheme
//! lifts, and a searched rank-23 (3,3,3) scheme whose linearized system
//! is inconsistent yields a structured failure report.

use rand::rngs::StdRng;
use rand::SeedableRng;

use mmrank::lift::{lift, LiftOutcome};
use mmrank::io;

fn fixture(name: &str) -> String {
    let path = format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn obstructed_scheme_reports_attempt_depths() {
    let s = io::parse(&fixture("333-23-obstructed.scheme")).unwrap();
    let gf2 = s.as_gf2().unwrap();
    assert!(gf2.verify());
    let mut rng = StdRng::seed_from_u64(11);
    match lift(gf2, 8, 16, &mut rng).unwrap() {
        LiftOutcome::Lifted(lifted) => {
            // not expected for this particular scheme, but a lift is a
            // lift; it must then be exact
            assert!(lifted.verify());
            panic!("scheme unexpectedly lifted; replace the fixture");
        }
        LiftOutcome::Failed(report) => {
            assert_eq!(report.attempts.len(), 8);
            for a in &report.attempts {
                // every attempt is correct mod 2^max_k and stopped either
                // at an obstruction or at the precision cap
                assert!(a.max_k >= 2);
                if let Some(k) = a.obstructed_at {
                    assert!(k > a.max_k);
                } else {
                    assert_eq!(a.max_k, 16);
                }
            }
        }
    }
}
