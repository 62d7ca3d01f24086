mod common;

use common::*;
use presmin::inference::{
    classify, decompose, expanding_evidence, find_uniform_period, separated_at,
    successor_gap_bound, Classification, SegmentEnd,
};
use presmin::sources::resolve_str;
use presmin::window::{restrict_table, SearchLimits, Value, WindowEngine};
use presmin::{Error, Oracle, PrefixSet, SetHandle, UpSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn engine(h: &SetHandle) -> WindowEngine {
    WindowEngine::new(h).unwrap()
}

fn prefix_of(s: &UpSet, horizon: u64) -> SetHandle {
    PrefixSet::from_predicate(horizon, |x| s.contains(x)).unwrap().into()
}

#[test]
fn gap_bound_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..50 {
        let bits = random_bits(&mut rng, 300);
        let members: Vec<u64> = (0..300).filter(|&x| bits[x as usize]).collect();
        let expected = members.windows(2).map(|w| w[1] - w[0]).max();
        let h: SetHandle = PrefixSet::from_flags(bits).unwrap().into();
        assert_eq!(successor_gap_bound(&h, 299).unwrap(), expected);
    }
}

#[test]
fn decomposition_reproduces_canonical_parts() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..150 {
        let s = random_upset(&mut rng, 25, 12);
        let exact: SetHandle = s.clone().into();
        let dec = decompose(&engine(&exact), 24, None).unwrap();
        assert_eq!(dec.threshold, s.threshold(), "{s}");
        assert_eq!(dec.period, s.period(), "{s}");
        assert_eq!(dec.residues, s.residues());
        assert_eq!(dec.points, s.exceptional());
        assert!(dec.certified);
        if !s.is_finite() {
            assert_eq!(dec.segments.len(), 1);
            assert_eq!(dec.segments[0].hi, SegmentEnd::Infinite);
        }

        // the same set seen only through a long prefix
        let horizon = 10 * (s.threshold() + s.period()) + 200;
        let n_max = s.threshold() + s.period() + 1;
        let view = prefix_of(&s, horizon);
        let dec = decompose(&engine(&view), n_max, None).unwrap();
        assert_eq!(dec.to_upset().unwrap(), s);
        assert!(!dec.certified);
        if !s.is_finite() {
            assert_eq!(dec.segments[0].hi, SegmentEnd::AtHorizon(horizon));
        }
    }
}

#[test]
fn decomposition_examples() {
    let evens: SetHandle = UpSet::coset(2, 0).unwrap().into();
    let dec = decompose(&engine(&evens), 8, None).unwrap();
    assert!(dec.points.is_empty());
    assert_eq!((dec.segments[0].lo, dec.segments[0].modulus), (0, 2));
    assert_eq!(dec.segments[0].residues, vec![0]);

    let primes = resolve_str("builtin:primes?B=10000").unwrap();
    assert!(matches!(
        decompose(&engine(&primes), 40, None),
        Err(Error::InferenceFailure(_))
    ));
}

#[test]
fn period_override_is_verified() {
    let s: SetHandle = "up(N=5; E=1,2,3; d=7; R=5)".parse::<UpSet>().unwrap().into();
    let e = engine(&s);
    // a multiple of the period reconstructs the same set
    let dec = decompose(&e, 20, Some(14)).unwrap();
    assert_eq!((dec.threshold, dec.period), (4, 7));
    assert!(matches!(decompose(&e, 20, Some(3)), Err(Error::InferenceFailure(_))));
}

#[test]
fn oracle_with_periodic_tail() {
    let oracle = Oracle::new("junk-then-fives", 3000, |x| {
        if x < 40 {
            x % 7 == 3
        } else {
            x % 5 == 1 || x % 5 == 4
        }
    });
    let h: SetHandle = oracle.into();
    let report = classify(&h, 30, 3000, SearchLimits::default()).unwrap();
    let Classification::EventuallyPeriodic(dec) = report.classification else {
        panic!("expected a decomposition");
    };
    assert_eq!(dec.period, 5);
    assert_eq!(dec.residues, vec![1, 4]);
    assert_eq!(dec.segments[0].hi, SegmentEnd::AtHorizon(3000));
    for x in 0..=3000 {
        assert_eq!(
            dec.to_upset().unwrap().contains(x),
            if x < 40 { x % 7 == 3 } else { x % 5 == 1 || x % 5 == 4 }
        );
    }
}

fn corpus(rng: &mut ChaCha8Rng) -> Vec<(String, SetHandle)> {
    let mut out: Vec<(String, SetHandle)> = [
        "builtin:squares?B=10000",
        "builtin:primes?B=10000",
        "builtin:powers?k=2&B=10000",
        "builtin:powers?k=3&B=10000",
        "builtin:fibonacci?B=10000",
        "builtin:union(squares(10000), coset(1000, 0))",
    ]
    .iter()
    .map(|s| (s.to_string(), resolve_str(s).unwrap()))
    .collect();
    for i in 0..10 {
        let s = random_upset(rng, 25, 12);
        out.push((format!("up {i}: {s}"), s.clone().into()));
        out.push((format!("prefix {i}: {s}"), prefix_of(&s, 5000)));
    }
    for i in 0..5 {
        let bits = random_bits(rng, 3000);
        out.push((format!("noise {i}"), PrefixSet::from_flags(bits).unwrap().into()));
    }
    out
}

#[test]
fn outcomes_are_exclusive_and_consistent() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for (name, h) in corpus(&mut rng) {
        let bound = h.horizon().unwrap_or(5000);
        let report = classify(&h, 40, bound, SearchLimits::default()).unwrap();
        let e = engine(&h);
        let evidence = expanding_evidence(&e, 40, bound).unwrap();
        let decomposed = decompose(&e, 40, None);
        match &report.classification {
            Classification::EventuallyPeriodic(_) => {
                assert!(decomposed.is_ok(), "{name}");
            }
            Classification::ExpandingEvidence => {
                assert!(evidence.evidence, "{name}");
                assert!(evidence.witnesses.values().any(|row| row.count > 0));
            }
            Classification::Inconclusive => assert!(!evidence.evidence, "{name}"),
        }
        // evidence of expansion never coexists with a verified decomposition
        if evidence.evidence {
            assert!(decomposed.is_err(), "{name}");
        }
        if h.as_periodic().is_some() {
            assert!(matches!(report.classification, Classification::EventuallyPeriodic(_)), "{name}");
        }
    }
}

#[test]
fn expanding_inputs() {
    for spec in ["builtin:squares?B=10000", "builtin:primes?B=10000", "builtin:powers?k=2&B=10000"] {
        let h = resolve_str(spec).unwrap();
        let r = classify(&h, 40, 10_000, SearchLimits::default()).unwrap();
        assert_eq!(r.classification, Classification::ExpandingEvidence, "{spec}");
        assert_eq!(r.classification.exit_code(), 2);
    }
    let powers = resolve_str("builtin:powers?k=2&B=1048576").unwrap();
    let e = engine(&powers);
    assert!(expanding_evidence(&e, 50, 1 << 20).unwrap().evidence);
    let squares = resolve_str("builtin:squares?B=10000").unwrap();
    let ev = expanding_evidence(&engine(&squares), 50, 10_000).unwrap();
    assert!((1..=50).all(|n| ev.witnesses[&n].count > 0));
}

#[test]
fn witness_table_matches_definition() {
    let squares = resolve_str("builtin:squares?B=2000").unwrap();
    let ev = expanding_evidence(&engine(&squares), 30, 2000).unwrap();
    let members: Vec<u64> = (0..=44).map(|k| k * k).collect();
    for n in 1..=30u64 {
        let direct: Vec<u64> = members
            .iter()
            .copied()
            .filter(|&x| x + n <= 2000 && (x + 1..=x + n).all(|y| !members.contains(&y)))
            .collect();
        let row = &ev.witnesses[&n];
        assert_eq!(row.count, direct.len() as u64);
        assert_eq!(row.largest, direct.iter().rev().take(5).copied().collect::<Vec<_>>());
    }
}

#[test]
fn uniform_period_examples() {
    let all: SetHandle = UpSet::full().into();
    assert_eq!(find_uniform_period(&engine(&all), 10), Value::Defined(1));
    let mixed: SetHandle = mixed_parity_example().into();
    assert_eq!(find_uniform_period(&engine(&mixed), 10), Value::Defined(2));
}

#[test]
fn alpha_is_monotone_after_restriction() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..40 {
        let s = random_upset(&mut rng, 20, 10);
        let e = engine(&s.clone().into());
        let table: Vec<(u64, u64)> = e
            .first_bases(s.period(), 30)
            .into_iter()
            .enumerate()
            .filter_map(|(n, a)| a.map(|a| (n as u64, a)))
            .collect();
        let r = restrict_table(&table, 30);
        let values: Vec<u64> = r
            .domain
            .iter()
            .map(|n| table.iter().find(|(m, _)| m == n).unwrap().1)
            .collect();
        assert!(values.windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn factorial_separation_on_piecewise_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..30 {
        // two periodic pieces: period p on [0, g], period q after
        let p = rng.gen_range(2..=4u64);
        let q = rng.gen_range(2..=4u64);
        let g = rng.gen_range(30..80u64);
        let first: Vec<u64> = (0..=g).filter(|x| x % p == 0).collect();
        let s = UpSet::new(g + 1, &first, q, &[(g + 1) % q]).unwrap();
        if s.threshold() == 0 {
            // the pieces merged into a single periodic set
            continue;
        }
        let e = engine(&s.clone().into());
        // 4! is a multiple of both local periods and shorter than the first piece
        assert!(separated_at(&e, &[0, s.threshold()], 4).unwrap(), "{s}");
    }
}

#[test]
fn report_json_schema() {
    let h = resolve_str("up:up(N=5;E=1,2,3;d=7;R=5)").unwrap();
    let r = classify(&h, 14, 200, SearchLimits::default()).unwrap();
    let json = r.to_json();
    assert_eq!(json["classification"], "eventually-periodic");
    assert_eq!(json["N"], 4);
    assert_eq!(json["d"], 7);
    assert_eq!(json["residues"], serde_json::json!([5]));
    assert_eq!(json["points"], serde_json::json!([1, 2, 3]));
    assert_eq!(json["u"], 7);
    for key in ["witnesses", "profile"] {
        assert!(json[key].is_object(), "{key}");
    }
    assert_eq!(json["profile"]["3"]["status"], "defined");
}
