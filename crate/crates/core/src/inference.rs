//! The analysis pipeline: uniform period, stabilized offset, coset
//! decomposition, expanding-set evidence and the final classification.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::set::{PrefixSet, SetHandle, UpSet};
use crate::window::{
    restrict_table, MaxMatch, RestrictBranch, SearchLimits, Value, WindowEngine, WindowProfile,
};

/// Number of largest witnesses kept per gap length.
pub const WITNESS_EXAMPLES: usize = 5;

/// Largest `σ(x) − x` over members `x < bound` whose successor is `≤ bound`.
/// `None` when fewer than two members lie in `[0, bound]`.
pub fn successor_gap_bound(x: &SetHandle, bound: u64) -> Result<Option<u64>> {
    let members = x.to_prefix(bound)?.members();
    Ok(members.windows(2).map(|w| w[1] - w[0]).max())
}

/// Window length past which every search on `engine` is decided: for a
/// periodic input with threshold `N` and period `p`, a finite agreement run
/// is shorter than `N + p`.
fn decisive_length(engine: &WindowEngine, n_max: u64) -> u64 {
    match engine.periodic() {
        Some(s) => n_max.max(s.threshold() + s.period()),
        None => n_max,
    }
}

/// Least `d ≥ 1` such that for every `n ≤ n_max` some window of length `n`
/// repeats after `d`. For periodic inputs the range of `n` is widened until
/// the answer holds for all `n`.
pub fn find_uniform_period(engine: &WindowEngine, n_max: u64) -> Value {
    let n = decisive_length(engine, n_max);
    let bound = engine.shift_bound(n);
    match (1..=bound).find(|&d| engine.first_bases(d, n)[n as usize].is_some()) {
        Some(d) => Value::Defined(d),
        None if engine.periodic().is_some() && engine.is_exact(n) => Value::ProvablyUndefined,
        None => Value::UndefinedAtHorizon,
    }
}

/// Upper end of a segment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "at", rename_all = "kebab-case")]
pub enum SegmentEnd {
    Infinite,
    AtHorizon(u64),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub lo: u64,
    pub hi: SegmentEnd,
    pub modulus: u64,
    pub residues: Vec<u64>,
}

/// Finitely many points plus cosets of `dℕ` above a threshold.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub threshold: u64,
    pub period: u64,
    pub residues: Vec<u64>,
    pub points: Vec<u64>,
    pub segments: Vec<Segment>,
    /// Reconstruction was checked over all of ℕ rather than up to a horizon.
    pub certified: bool,
    /// `alpha` at the largest length of its monotone domain, before the
    /// threshold was minimized.
    pub stabilized_alpha: u64,
    /// Largest gap in the image of `alpha`.
    pub alpha_gap: Option<u64>,
    /// `alpha(max(d, alpha_gap))`, when that length was tabulated.
    pub alpha_at_l: Option<u64>,
}

impl Decomposition {
    pub fn to_upset(&self) -> Result<UpSet> {
        UpSet::new(self.threshold, &self.points, self.period, &self.residues)
    }
}

/// Decomposes the input into exceptional points and residues of a single
/// period. `period` overrides the uniform-period search. The result is
/// checked against the input (exactly for periodic inputs, pointwise up to
/// the horizon otherwise); any mismatch is an inference failure.
pub fn decompose(engine: &WindowEngine, n_max: u64, period: Option<u64>) -> Result<Decomposition> {
    let d = match period {
        Some(0) => return Err(Error::InferenceFailure("period must be at least 1".into())),
        Some(d) => d,
        None => find_uniform_period(engine, n_max).defined().ok_or_else(|| {
            Error::InferenceFailure("no uniform period within the search bound".into())
        })?,
    };
    let n_top = decisive_length(engine, n_max);
    let alpha: Vec<(u64, u64)> = engine
        .first_bases(d, n_top)
        .into_iter()
        .enumerate()
        .filter_map(|(n, a)| a.map(|a| (n as u64, a)))
        .collect();
    if alpha.is_empty() {
        return Err(Error::InferenceFailure(format!(
            "no window repeats after shift {d}"
        )));
    }
    let restriction = restrict_table(&alpha, n_top);
    let on_domain: Vec<u64> = alpha
        .iter()
        .filter(|(n, _)| restriction.domain.binary_search(n).is_ok())
        .map(|&(_, a)| a)
        .collect();
    let alpha_gap = {
        let mut image = on_domain.clone();
        image.dedup();
        image.windows(2).map(|w| w[1] - w[0]).max()
    };
    let l = d.max(alpha_gap.unwrap_or(0));
    let alpha_at_l = alpha.iter().find(|&&(n, _)| n == l).map(|&(_, a)| a);
    let stabilized_alpha = match restriction.branch {
        RestrictBranch::ConstantFiber(v) => v,
        RestrictBranch::StrictIncrease => *on_domain.last().expect("nonempty domain"),
    };

    let horizon = engine.horizon();
    let fits = |x: u64| horizon.map_or(true, |h| x <= h);
    let mut threshold = stabilized_alpha;
    while threshold > 0
        && fits(threshold - 1 + d)
        && engine.contains(threshold - 1)? == engine.contains(threshold - 1 + d)?
    {
        threshold -= 1;
    }
    if !fits(threshold + d - 1) {
        return Err(Error::InferenceFailure(format!(
            "threshold {threshold} leaves less than one period below the horizon"
        )));
    }
    let mut residues = Vec::new();
    for x in threshold..threshold + d {
        if engine.contains(x)? {
            residues.push(x % d);
        }
    }
    residues.sort_unstable();
    let mut points = Vec::new();
    for x in 0..threshold {
        if engine.contains(x)? {
            points.push(x);
        }
    }
    let candidate = UpSet::new(threshold, &points, d, &residues)?;

    let certified = match engine.periodic() {
        Some(source) => {
            if &candidate != source {
                return Err(Error::InferenceFailure(format!(
                    "reconstruction {candidate} differs from {source}"
                )));
            }
            true
        }
        None => {
            let h = horizon.expect("finite input");
            if let Some(x) = (0..=h).find(|&x| candidate.contains(x) != engine.contains(x).unwrap_or(false)) {
                return Err(Error::InferenceFailure(format!(
                    "reconstruction with period {d} from {threshold} disagrees at {x}"
                )));
            }
            false
        }
    };

    let hi = match horizon {
        None => SegmentEnd::Infinite,
        Some(h) => SegmentEnd::AtHorizon(h),
    };
    let segments = if candidate.is_finite() {
        Vec::new()
    } else {
        vec![Segment {
            lo: candidate.threshold(),
            hi,
            modulus: candidate.period(),
            residues: candidate.residues(),
        }]
    };
    Ok(Decomposition {
        threshold: candidate.threshold(),
        period: candidate.period(),
        residues: candidate.residues(),
        points: candidate.exceptional(),
        segments,
        certified,
        stabilized_alpha,
        alpha_gap,
        alpha_at_l,
    })
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessRow {
    pub count: u64,
    /// Largest witnesses, descending.
    pub largest: Vec<u64>,
}

/// Members followed by long gaps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpandingEvidence {
    pub horizon: u64,
    /// For each `n ≥ 1`, members `x ≤ horizon − n` with `x+1, …, x+n ∉ X`.
    pub witnesses: BTreeMap<u64, WitnessRow>,
    /// Closed gaps `(x, σ(x) − x)` that exceed every earlier gap.
    pub record_gaps: Vec<(u64, u64)>,
    pub evidence: bool,
}

/// Tabulates gap witnesses on `[0, bound]` and decides whether the gaps look
/// unbounded.
///
/// Evidence is declared when at least two record gaps occur and the last
/// record closes in the upper half of the horizon: the largest gap seen so
/// far is still growing. Periodic inputs never qualify since their gaps are
/// bounded (or the set is finite).
pub fn expanding_evidence(engine: &WindowEngine, n_max: u64, bound: u64) -> Result<ExpandingEvidence> {
    if let Some(h) = engine.horizon() {
        if bound > h {
            return Err(Error::HorizonExceeded {
                query: bound,
                horizon: h,
            });
        }
    }
    let mut members = Vec::new();
    for x in 0..=bound {
        if engine.contains(x)? {
            members.push(x);
        }
    }
    let mut witnesses: BTreeMap<u64, WitnessRow> =
        (1..=n_max).map(|n| (n, WitnessRow::default())).collect();
    for (i, &x) in members.iter().enumerate().rev() {
        let gap_end = members.get(i + 1).copied().unwrap_or(bound + 1);
        let reach = (gap_end - x - 1).min(bound - x).min(n_max);
        for n in 1..=reach {
            let row = witnesses.get_mut(&n).expect("row for every n");
            row.count += 1;
            if row.largest.len() < WITNESS_EXAMPLES {
                row.largest.push(x);
            }
        }
    }
    let mut record_gaps: Vec<(u64, u64)> = Vec::new();
    for w in members.windows(2) {
        let gap = w[1] - w[0];
        if record_gaps.last().map_or(true, |&(_, g)| gap > g) {
            record_gaps.push((w[0], gap));
        }
    }
    let evidence = engine.periodic().is_none()
        && record_gaps.len() >= 2
        && record_gaps
            .last()
            .is_some_and(|&(x, g)| 2 * (x + g) > bound);
    Ok(ExpandingEvidence {
        horizon: bound,
        witnesses,
        record_gaps,
        evidence,
    })
}

/// `M(x, k!)` for `k = 1, …, k_max` (as long as `x + k!` stays within the
/// horizon).
pub fn factorial_matches(engine: &WindowEngine, x: u64, k_max: u64) -> Result<Vec<(u64, MaxMatch)>> {
    let mut out = Vec::new();
    let mut fact: u64 = 1;
    for k in 1..=k_max {
        fact = match fact.checked_mul(k) {
            Some(f) => f,
            None => break,
        };
        if engine.horizon().is_some_and(|h| x.saturating_add(fact) > h) {
            break;
        }
        out.push((k, engine.big_m(x, fact)?));
    }
    Ok(out)
}

/// Whether `M(starts[i], k!)` strictly increases along `starts`. Matches that
/// reach the horizon or are certified infinite rank above every finite one.
pub fn separated_at(engine: &WindowEngine, starts: &[u64], k: u64) -> Result<bool> {
    let fact = (1..=k).try_fold(1u64, |acc, i| acc.checked_mul(i)).ok_or_else(|| {
        Error::Capacity(format!("{k}! overflows"))
    })?;
    let rank = |m: MaxMatch| match m {
        MaxMatch::Undefined => None,
        MaxMatch::Finite(h) => Some(h as u128),
        MaxMatch::AtHorizon(_) | MaxMatch::InfiniteCertified => Some(u128::MAX),
    };
    let mut previous: Option<u128> = None;
    for (i, &x) in starts.iter().enumerate() {
        let Some(r) = rank(engine.big_m(x, fact)?) else {
            return Ok(false);
        };
        if i > 0 && previous.is_some_and(|p| p >= r) {
            return Ok(false);
        }
        previous = Some(r);
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Classification {
    EventuallyPeriodic(Decomposition),
    ExpandingEvidence,
    Inconclusive,
}

impl Classification {
    pub fn label(&self) -> &'static str {
        match self {
            Classification::EventuallyPeriodic(_) => "eventually-periodic",
            Classification::ExpandingEvidence => "expanding-evidence",
            Classification::Inconclusive => "inconclusive",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Classification::EventuallyPeriodic(_) => 0,
            Classification::ExpandingEvidence => 2,
            Classification::Inconclusive => 3,
        }
    }
}

#[derive(Clone, Debug)]
pub struct AnalysisReport {
    pub classification: Classification,
    pub uniform_period: Value,
    /// Largest successor gap of the input on `[0, B]`.
    pub gap_bound: Option<u64>,
    pub evidence: ExpandingEvidence,
    pub profile: WindowProfile,
    /// Why decomposition failed, when it did.
    pub failure: Option<String>,
}

impl AnalysisReport {
    /// `{classification, N, d, residues[], points[], u, witnesses{n: [x...]}, profile}`.
    pub fn to_json(&self) -> serde_json::Value {
        let (threshold, period, residues, points) = match &self.classification {
            Classification::EventuallyPeriodic(dec) => (
                Some(dec.threshold),
                Some(dec.period),
                dec.residues.clone(),
                dec.points.clone(),
            ),
            _ => (None, self.uniform_period.defined(), Vec::new(), Vec::new()),
        };
        let witnesses: BTreeMap<String, Vec<u64>> = self
            .evidence
            .witnesses
            .iter()
            .map(|(n, row)| (n.to_string(), row.largest.clone()))
            .collect();
        serde_json::json!({
            "classification": self.classification.label(),
            "N": threshold,
            "d": period,
            "residues": residues,
            "points": points,
            "u": self.gap_bound,
            "witnesses": witnesses,
            "profile": self.profile.to_json(),
        })
    }
}

/// Runs the whole pipeline on `x` restricted to `[0, bound]` (periodic
/// inputs are analysed exactly and `bound` only limits the witness table).
pub fn classify(x: &SetHandle, n_max: u64, bound: u64, limits: SearchLimits) -> Result<AnalysisReport> {
    let bound = x.horizon().map_or(bound, |h| bound.min(h));
    let view = match x {
        SetHandle::Periodic(_) => x.clone(),
        _ => SetHandle::Prefix(x.to_prefix(bound)?),
    };
    let engine = WindowEngine::new(&view)?.with_limits(limits);
    let uniform_period = find_uniform_period(&engine, n_max);
    let (classification, failure, evidence) = match decompose(&engine, n_max, uniform_period.defined()) {
        Ok(dec) => (
            Classification::EventuallyPeriodic(dec),
            None,
            expanding_evidence(&engine, n_max, bound)?,
        ),
        Err(Error::InferenceFailure(why)) => {
            let ev = expanding_evidence(&engine, n_max, bound)?;
            let c = if ev.evidence {
                Classification::ExpandingEvidence
            } else {
                Classification::Inconclusive
            };
            (c, Some(why), ev)
        }
        Err(e) => return Err(e),
    };
    let alpha_shift = match &classification {
        Classification::EventuallyPeriodic(dec) => Some(dec.period),
        _ => uniform_period.defined(),
    };
    let profile = engine.profile(n_max, alpha_shift);
    Ok(AnalysisReport {
        classification,
        uniform_period,
        gap_bound: successor_gap_bound(&view, bound)?,
        evidence,
        profile,
        failure,
    })
}

/// Convenience wrapper for a prefix given by its members.
pub fn prefix_of(horizon: u64, members: impl IntoIterator<Item = u64>) -> Result<SetHandle> {
    Ok(PrefixSet::from_members(horizon, members)?.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn up(s: &str) -> SetHandle {
        s.parse::<UpSet>().unwrap().into()
    }

    fn engine(h: &SetHandle) -> WindowEngine {
        WindowEngine::new(h).unwrap()
    }

    fn squares(bound: u64) -> SetHandle {
        prefix_of(bound, (0..).map(|k: u64| k * k).take_while(|&s| s <= bound)).unwrap()
    }

    #[test]
    fn gap_bound_examples() {
        assert_eq!(successor_gap_bound(&up("up(d=3; R=0)"), 30).unwrap(), Some(3));
        assert_eq!(successor_gap_bound(&up("up(d=10; R=0,1)"), 100).unwrap(), Some(9));
        assert_eq!(successor_gap_bound(&squares(100), 100).unwrap(), Some(19));
        assert_eq!(successor_gap_bound(&up("up(N=2; E=1; d=1; R=)"), 50).unwrap(), None);
    }

    #[test]
    fn uniform_period_examples() {
        let e = engine(&up("up(d=2; R=0)"));
        assert_eq!(find_uniform_period(&e, 10), Value::Defined(2));
        let thirds: Vec<String> = (0..=50).filter(|x| x % 3 == 0).map(|x| x.to_string()).collect();
        let mixed = up(&format!("up(N=51; E={}; d=2; R=0)", thirds.join(",")));
        assert_eq!(find_uniform_period(&engine(&mixed), 10), Value::Defined(2));
        assert_eq!(find_uniform_period(&engine(&up("up(d=1; R=0)")), 10), Value::Defined(1));
    }

    #[test]
    fn uniform_period_ignores_short_prefix_runs() {
        // the tail has runs of six non-members, so d = 1 matches short windows
        let e = engine(&up("up(N=5; E=1,2,3; d=7; R=5)"));
        assert_eq!(find_uniform_period(&e, 2), Value::Defined(7));
    }

    #[test]
    fn decompose_examples() {
        let s = up("up(N=5; E=1,2,3; d=7; R=5)");
        let dec = decompose(&engine(&s), 14, None).unwrap();
        assert_eq!(dec.points, vec![1, 2, 3]);
        assert_eq!(
            dec.segments,
            vec![Segment {
                lo: 4,
                hi: SegmentEnd::Infinite,
                modulus: 7,
                residues: vec![5]
            }]
        );
        assert!(dec.certified);
        assert_eq!(&dec.to_upset().unwrap(), s.as_periodic().unwrap());

        let dec = decompose(&engine(&up("up(d=2; R=0)")), 4, None).unwrap();
        assert!(dec.points.is_empty());
        assert_eq!(dec.segments[0].lo, 0);
        assert_eq!(dec.segments[0].modulus, 2);

        let finite = decompose(&engine(&up("up(N=4; E=1,3; d=1; R=)")), 4, None).unwrap();
        assert_eq!(finite.points, vec![1, 3]);
        assert!(finite.segments.is_empty());
    }

    #[test]
    fn decompose_prefix_reports_horizon() {
        let h = prefix_of(300, (0..=300).filter(|&x| x == 1 || (x >= 5 && x % 7 == 5))).unwrap();
        let dec = decompose(&engine(&h), 20, None).unwrap();
        assert_eq!((dec.threshold, dec.period, dec.residues.clone()), (2, 7, vec![5]));
        assert_eq!(dec.points, vec![1]);
        assert_eq!(dec.segments[0].hi, SegmentEnd::AtHorizon(300));
        assert!(!dec.certified);
    }

    #[test]
    fn decompose_rejects_squares() {
        let err = decompose(&engine(&squares(2000)), 20, None).unwrap_err();
        assert!(matches!(err, Error::InferenceFailure(_)));
    }

    #[test]
    fn evidence_examples() {
        let sq = squares(10_000);
        let ev = expanding_evidence(&engine(&sq), 50, 10_000).unwrap();
        assert!(ev.evidence);
        assert!(ev.witnesses.values().all(|row| row.count > 0));
        let ev = expanding_evidence(&engine(&up("up(d=2; R=0)")), 5, 1000).unwrap();
        assert!(!ev.evidence);
        assert!(ev.witnesses[&1].count > 0);
        assert_eq!(ev.witnesses[&2].count, 0);
        let pow = prefix_of(1 << 20, (0..=20).map(|k| 1u64 << k)).unwrap();
        assert!(expanding_evidence(&engine(&pow), 50, 1 << 20).unwrap().evidence);
    }

    #[test]
    fn evidence_ignores_finite_and_junk_prefixes() {
        let finite = prefix_of(1000, [3, 9000 % 1000, 950]).unwrap();
        let ev = expanding_evidence(&engine(&finite), 10, 1000).unwrap();
        // one closing gap in the upper half, but it is the only growth step
        assert!(ev.record_gaps.len() <= 2);
        let junk_then_evens =
            prefix_of(1000, [0, 50, 100].into_iter().chain((200..=1000).step_by(2))).unwrap();
        assert!(!expanding_evidence(&engine(&junk_then_evens), 40, 1000).unwrap().evidence);
    }

    #[test]
    fn separation_chain_on_piecewise_set() {
        let thirds: Vec<String> = (0..=50).filter(|x| x % 3 == 0).map(|x| x.to_string()).collect();
        let mixed = up(&format!("up(N=51; E={}; d=2; R=0)", thirds.join(",")));
        let e = engine(&mixed);
        // 3! is a multiple of both local periods
        assert_eq!(e.big_m(0, 6).unwrap(), MaxMatch::Finite(50));
        assert_eq!(e.big_m(51, 6).unwrap(), MaxMatch::InfiniteCertified);
        assert!(separated_at(&e, &[0, 51], 3).unwrap());
        let rows = factorial_matches(&e, 51, 5).unwrap();
        assert!(rows.iter().filter(|(k, _)| *k >= 2).all(|(_, m)| *m == MaxMatch::InfiniteCertified));
    }

    #[test]
    fn classify_examples() {
        let r = classify(&up("up(N=5; E=1,2,3; d=7; R=5)"), 14, 500, SearchLimits::default()).unwrap();
        assert_eq!(r.classification.exit_code(), 0);
        let r = classify(&squares(10_000), 40, 10_000, SearchLimits::default()).unwrap();
        assert_eq!(r.classification, Classification::ExpandingEvidence);
        let json = r.to_json();
        assert_eq!(json["classification"], "expanding-evidence");
        assert!(json["N"].is_null());
    }
}
