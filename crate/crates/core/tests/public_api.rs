use num_bigint::BigUint;
use proptest::prelude::*;

use singcount_core::counting::{self, Budgets, CountResult, Engine};
use singcount_core::diagnostics::{h_sweep, rs_report, Thresholds, Verdict};
use singcount_core::exact::{format_rational, parse_rational};
use singcount_core::rings::{LocalRingSpec, PrimePower, RingKind};
use singcount_core::schemes::{corpus, load_scheme_json, SchemeDocument};
use singcount_core::Error;

#[test]
fn scheme_documents_round_trip() {
    for x in corpus::all() {
        let doc = SchemeDocument::from_scheme(&x);
        let text = serde_json::to_string(&doc).unwrap();
        let back = load_scheme_json(&text).unwrap();
        assert_eq!(back.canonical_form(), x.canonical_form());
    }
}

#[test]
fn malformed_documents_report_positions() {
    match load_scheme_json("{\"name\": \"x\",\n \"vars\": [1]}") {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
        other => panic!("expected a parse error, got {other:?}"),
    }
    assert!(load_scheme_json(r#"{"name": "x", "vars": ["x"], "polys": ["y"], "dim": 1}"#).is_err());
    assert!(load_scheme_json(r#"{"name": "x", "vars": ["x"], "polys": [], "dim": 2}"#).is_err());
}

#[test]
fn count_results_serialize_exactly() {
    let spec: LocalRingSpec = "mixed:3^1:2".parse().unwrap();
    let r = counting::count(&corpus::cone(), spec, Some(Engine::BruteForce), &Budgets::default()).unwrap();
    let json = serde_json::to_value(&r).unwrap();
    assert_eq!(json["count"], "99");
    assert_eq!(json["spec"], "mixed:3^1:2");
    let back: CountResult = serde_json::from_value(json).unwrap();
    assert_eq!(back.count, BigUint::from(99u32));
}

#[test]
fn end_to_end_report() {
    let qs: Vec<PrimePower> = [3, 5].iter().map(|&p| PrimePower::prime(p).unwrap()).collect();
    let table = h_sweep(&corpus::sl2(), &qs, 2, &[RingKind::Mixed], &Budgets::default());
    assert!(table.failures.is_empty());
    let report = rs_report(&table, Thresholds::default());
    assert_eq!(report.verdict, Verdict::RsConsistent);
    assert!(table.to_csv().starts_with("scheme,q,m,kind,count,h_num,h_den\n"));
}

proptest! {
    #[test]
    fn rationals_print_and_parse(n in -10_000i64..10_000, d in 1i64..10_000) {
        let r = num_rational::BigRational::new(n.into(), d.into());
        prop_assert_eq!(parse_rational(&format_rational(&r)), Some(r));
    }

    #[test]
    fn engines_agree_on_random_rings(p in prop::sample::select(vec![2u64, 3, 5]), m in 1u32..3, equal in any::<bool>()) {
        let kind = if equal { RingKind::Equal } else { RingKind::Mixed };
        let spec = LocalRingSpec::new(PrimePower::prime(p).unwrap(), m, kind).unwrap();
        let b = Budgets::default();
        for x in [corpus::cusp(), corpus::crossing(), corpus::cone()] {
            let lift = counting::count_lift(&x, spec, &b).unwrap().count;
            let brute = counting::count_bruteforce(&x, spec, &b).unwrap().count;
            prop_assert_eq!(lift, brute);
        }
    }
}
