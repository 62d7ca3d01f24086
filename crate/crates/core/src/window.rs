//! Windows `X[a,b]` and the minimizers built on them.
//!
//! A window is the offset-normalized trace `{x : a + x ∈ X, a + x ≤ b}`.
//! Two windows of equal length coincide exactly when `X` agrees with its own
//! shift on the underlying interval, so every search below reduces to runs of
//! the agreement predicate `x ∈ X ⇔ x + g ∈ X`.
//!
//! | function | meaning |
//! |---|---|
//! | `dtilde(n)` | least shift `g > 0` such that some window of length `n` repeats after `g` |
//! | `atilde(n, d)` | least base `a` whose window of length `n` repeats after `d` |
//! | `big_d(n)` | least `d` whose base is not undercut by a larger shift that still fits within `a + n` |
//! | `big_a(n)` | `atilde(n, big_d(n))` |
//! | `alpha(n, d)` | `atilde` for a globally fixed `d` |
//! | `big_m(x, n)` | largest `h` with `X[x, h−n] = X[x+n, h]` |
//!
//! For an [`UpSet`] with threshold `N` and period `p` every search is exact:
//! bases range over `[0, N+p)` and shifts over `[1, N + p(n+2)]`, beyond which
//! the agreement pattern repeats. For finite prefixes with horizon `B` bases
//! range over `[0, B−n−g]` and shifts over `[1, B−n]`, and an empty search
//! only means nothing was found before the horizon.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::set::{PrefixSet, SetHandle, UpSet};

/// Shift bound used for finite inputs unless overridden.
pub const DEFAULT_MAX_SHIFT: u64 = 1 << 14;

/// Result of a bounded minimization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Value {
    Defined(u64),
    /// Nothing found within the search bound of a finite input.
    UndefinedAtHorizon,
    /// Nothing exists; only reported for exact (periodic) inputs.
    ProvablyUndefined,
}

impl Value {
    pub fn defined(self) -> Option<u64> {
        match self {
            Value::Defined(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_defined(self) -> bool {
        matches!(self, Value::Defined(_))
    }

    pub fn status(self) -> Status {
        match self {
            Value::Defined(_) => Status::Defined,
            Value::UndefinedAtHorizon => Status::UndefinedAtHorizon,
            Value::ProvablyUndefined => Status::ProvablyUndefined,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Defined,
    UndefinedAtHorizon,
    ProvablyUndefined,
}

/// Value of `big_m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "h", rename_all = "kebab-case")]
pub enum MaxMatch {
    /// The match holds up to `h` and fails at `h + 1`.
    Finite(u64),
    /// The match provably holds forever.
    InfiniteCertified,
    /// The match holds up to the horizon `h` of a finite input.
    AtHorizon(u64),
    /// Even `h = x + n` fails.
    Undefined,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub base: u64,
    pub length: u64,
    pub content: Vec<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    /// Largest shift examined; `None` keeps the natural bound.
    pub max_shift: Option<u64>,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_shift: Some(DEFAULT_MAX_SHIFT),
        }
    }
}

impl SearchLimits {
    pub fn unbounded() -> Self {
        SearchLimits { max_shift: None }
    }

    pub fn with_max_shift(max_shift: u64) -> Self {
        SearchLimits {
            max_shift: Some(max_shift),
        }
    }
}

#[derive(Clone, Debug)]
enum Source {
    Periodic(UpSet),
    Finite(PrefixSet),
}

/// Window machinery over one set. Oracles are materialized once on
/// construction; everything afterwards is a pure function of the trace.
#[derive(Clone, Debug)]
pub struct WindowEngine {
    source: Source,
    limits: SearchLimits,
}

impl WindowEngine {
    pub fn new(set: &SetHandle) -> Result<Self> {
        let source = match set {
            SetHandle::Periodic(s) => Source::Periodic(s.clone()),
            SetHandle::Prefix(p) => Source::Finite(p.clone()),
            SetHandle::Oracle(o) => Source::Finite(set.to_prefix(o.horizon())?),
        };
        Ok(WindowEngine {
            source,
            limits: SearchLimits::default(),
        })
    }

    pub fn with_limits(mut self, limits: SearchLimits) -> Self {
        self.limits = limits;
        self
    }

    pub fn horizon(&self) -> Option<u64> {
        match &self.source {
            Source::Periodic(_) => None,
            Source::Finite(p) => Some(p.horizon()),
        }
    }

    pub fn periodic(&self) -> Option<&UpSet> {
        match &self.source {
            Source::Periodic(s) => Some(s),
            Source::Finite(_) => None,
        }
    }

    #[inline]
    fn member(&self, x: u64) -> bool {
        match &self.source {
            Source::Periodic(s) => s.contains(x),
            Source::Finite(p) => p.get(x),
        }
    }

    pub fn contains(&self, x: u64) -> Result<bool> {
        self.check(x)?;
        Ok(self.member(x))
    }

    fn check(&self, x: u64) -> Result<()> {
        match self.horizon() {
            Some(horizon) if x > horizon => Err(Error::HorizonExceeded { query: x, horizon }),
            _ => Ok(()),
        }
    }

    #[inline]
    fn agrees(&self, x: u64, g: u64) -> bool {
        self.member(x) == self.member(x + g)
    }

    /// The natural shift bound for windows of length `n`, before limits.
    fn natural_shift_bound(&self, n: u64) -> u64 {
        match &self.source {
            Source::Periodic(s) => s.threshold() + s.period() * (n + 2),
            Source::Finite(p) => p.horizon().saturating_sub(n),
        }
    }

    /// Largest shift searched for windows of length `n`.
    pub fn shift_bound(&self, n: u64) -> u64 {
        let natural = self.natural_shift_bound(n);
        self.limits.max_shift.map_or(natural, |cap| natural.min(cap))
    }

    /// Whether searches for length `n` are exhaustive over all of ℕ.
    pub fn is_exact(&self, n: u64) -> bool {
        matches!(self.source, Source::Periodic(_))
            && self.shift_bound(n) == self.natural_shift_bound(n)
    }

    fn miss(&self, n: u64) -> Value {
        if self.is_exact(n) {
            Value::ProvablyUndefined
        } else {
            Value::UndefinedAtHorizon
        }
    }

    /// `X[a,b]`.
    pub fn window(&self, a: u64, b: u64) -> Result<Window> {
        if a > b {
            return Err(Error::Malformed(format!("window base {a} exceeds end {b}")));
        }
        self.check(b)?;
        Ok(Window {
            base: a,
            length: b - a,
            content: (a..=b).filter(|&x| self.member(x)).map(|x| x - a).collect(),
        })
    }

    /// `X[a,b] = X[a+g, b+g]`, decided by comparing the two windows.
    pub fn shift_match(&self, a: u64, b: u64, g: u64) -> Result<bool> {
        let end = b
            .checked_add(g)
            .ok_or(Error::HorizonExceeded { query: u64::MAX, horizon: b })?;
        self.check(end)?;
        Ok(self.window(a, b)?.content == self.window(a + g, end)?.content)
    }

    /// `atilde(n, g)` for every `n ≤ n_max`, from one left-to-right scan of
    /// the agreement runs for shift `g`. Entries are nondecreasing in `n`.
    pub fn first_bases(&self, g: u64, n_max: u64) -> Vec<Option<u64>> {
        let mut out = vec![None; n_max as usize + 1];
        if g == 0 {
            out.iter_mut().for_each(|e| *e = Some(0));
            return out;
        }
        let (scan_end, base_end) = match &self.source {
            Source::Periodic(s) => {
                let base_end = s.threshold() + s.period();
                (base_end + n_max, base_end)
            }
            Source::Finite(p) => {
                if g > p.horizon() {
                    return out;
                }
                let end = p.horizon() - g + 1;
                (end, end)
            }
        };
        let mut next = 0usize;
        let mut run_start = 0;
        let mut run_len = 0u64;
        for x in 0..scan_end {
            if !self.agrees(x, g) {
                run_len = 0;
                continue;
            }
            if run_len == 0 {
                run_start = x;
                if run_start >= base_end {
                    break;
                }
            }
            run_len += 1;
            while next < out.len() && run_len > next as u64 {
                out[next] = Some(run_start);
                next += 1;
            }
            if next == out.len() {
                break;
            }
        }
        out
    }

    /// Least base `a` with `X[a, a+n] = X[a+d, a+n+d]`.
    pub fn atilde(&self, n: u64, d: u64) -> Value {
        if d == 0 {
            return Value::Defined(0);
        }
        match self.first_bases(d, n)[n as usize] {
            Some(a) => Value::Defined(a),
            None if matches!(self.source, Source::Periodic(_)) => Value::ProvablyUndefined,
            None => Value::UndefinedAtHorizon,
        }
    }

    /// `alpha(n)` for the fixed shift `d`.
    pub fn alpha(&self, n: u64, d: u64) -> Value {
        self.atilde(n, d)
    }

    /// `atilde(n, g)` for `g` in `1..=shift_bound(n)`; index 0 is unused.
    fn column(&self, n: u64) -> Vec<Option<u64>> {
        let bound = self.shift_bound(n);
        let mut col = vec![None; bound as usize + 1];
        col[1..]
            .par_iter_mut()
            .enumerate()
            .for_each(|(i, slot)| *slot = self.first_bases(i as u64 + 1, n)[n as usize]);
        col
    }

    /// Least shift `g > 0` admitting a repeated window of length `n`.
    pub fn dtilde(&self, n: u64) -> Value {
        let bound = self.shift_bound(n);
        for g in 1..=bound {
            if self.first_bases(g, n)[n as usize].is_some() {
                return Value::Defined(g);
            }
        }
        self.miss(n)
    }

    /// `(D(n), A(n))`.
    pub fn twisted(&self, n: u64) -> (Value, Value) {
        twisted_from_column(&self.column(n), n, self.miss(n))
    }

    pub fn big_d(&self, n: u64) -> Value {
        self.twisted(n).0
    }

    pub fn big_a(&self, n: u64) -> Value {
        self.twisted(n).1
    }

    /// `max{h ≥ x+n : X[x, h−n] = X[x+n, h]}`.
    pub fn big_m(&self, x: u64, n: u64) -> Result<MaxMatch> {
        let top = x
            .checked_add(n)
            .ok_or(Error::HorizonExceeded { query: u64::MAX, horizon: x })?;
        self.check(top)?;
        if !self.agrees(x, n) {
            return Ok(MaxMatch::Undefined);
        }
        match &self.source {
            Source::Periodic(s) => {
                // agreement for y ≥ N repeats with period p, so one full
                // period past max(x, N) certifies the rest
                let end = x.max(s.threshold()) + s.period();
                match (x..end).find(|&y| !self.agrees(y, n)) {
                    Some(y) => Ok(MaxMatch::Finite(y - 1 + n)),
                    None => Ok(MaxMatch::InfiniteCertified),
                }
            }
            Source::Finite(p) => {
                let last = p.horizon() - n;
                match (x..=last).find(|&y| !self.agrees(y, n)) {
                    Some(y) => Ok(MaxMatch::Finite(y - 1 + n)),
                    None => Ok(MaxMatch::AtHorizon(p.horizon())),
                }
            }
        }
    }

    /// Tabulates `dtilde`, `D`, `A` and (when a shift is given) `alpha` for
    /// `n ∈ [0, n_max]`. Columns are computed in parallel and assembled in
    /// order, so the result is deterministic.
    pub fn profile(&self, n_max: u64, alpha_shift: Option<u64>) -> WindowProfile {
        let max_bound = (0..=n_max).map(|n| self.shift_bound(n)).max().unwrap_or(0);
        let table: Vec<Vec<Option<u64>>> = (1..=max_bound)
            .into_par_iter()
            .map(|g| self.first_bases(g, n_max))
            .collect();
        let alpha_row = alpha_shift.map(|d| self.first_bases(d, n_max));
        let entries: Vec<ProfileEntry> = (0..=n_max)
            .into_par_iter()
            .map(|n| {
                let bound = self.shift_bound(n) as usize;
                let miss = self.miss(n);
                let mut col = vec![None; bound + 1];
                for g in 1..=bound {
                    col[g] = table[g - 1][n as usize];
                }
                let dtilde = (1..=bound)
                    .find(|&g| col[g].is_some())
                    .map_or(miss, |g| Value::Defined(g as u64));
                let (big_d, big_a) = twisted_from_column(&col, n, miss);
                let alpha = match (&alpha_row, alpha_shift) {
                    (Some(row), _) => row[n as usize].map_or(
                        if matches!(self.source, Source::Periodic(_)) {
                            Value::ProvablyUndefined
                        } else {
                            Value::UndefinedAtHorizon
                        },
                        Value::Defined,
                    ),
                    (None, _) => Value::UndefinedAtHorizon,
                };
                ProfileEntry {
                    n,
                    dtilde,
                    big_d,
                    big_a,
                    alpha,
                }
            })
            .collect();
        WindowProfile::assemble(n_max, alpha_shift, self.is_exact(n_max), entries)
    }
}

/// The twisted minimizer over a precomputed column of `atilde(n, ·)`.
///
/// `d` qualifies when `atilde(n, d)` is defined and no larger `d'` has a
/// smaller base whose shifted copy still ends by `atilde(n, d) + n`. Such a
/// `d'` satisfies `d' ≤ atilde(n, d') + d' ≤ atilde(n, d) + n`, which bounds
/// the inner scan.
fn twisted_from_column(col: &[Option<u64>], n: u64, miss: Value) -> (Value, Value) {
    let bound = col.len().saturating_sub(1) as u64;
    for d in 1..=bound {
        let Some(a) = col[d as usize] else { continue };
        let inner_end = bound.min(a + n);
        let undercut = (d + 1..=inner_end).any(|d2| match col[d2 as usize] {
            Some(a2) => !(a <= a2 || a2 + d2 > a + n),
            None => false,
        });
        if !undercut {
            return (Value::Defined(d), Value::Defined(a));
        }
    }
    (miss, miss)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProfileEntry {
    pub n: u64,
    pub dtilde: Value,
    pub big_d: Value,
    pub big_a: Value,
    pub alpha: Value,
}

impl ProfileEntry {
    /// Worst status among the tabulated values.
    pub fn status(&self) -> Status {
        [self.dtilde, self.big_d, self.big_a, self.alpha]
            .iter()
            .map(|v| v.status())
            .max()
            .unwrap_or(Status::Defined)
    }
}

/// Tabulated window functions for `n ∈ [0, n_max]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowProfile {
    pub n_max: u64,
    pub alpha_shift: Option<u64>,
    /// Every search was exhaustive over ℕ.
    pub exact: bool,
    pub entries: Vec<ProfileEntry>,
    /// Lengths on which `D` and then `A` are nondecreasing.
    pub monotone_domain: Vec<u64>,
    /// Lengths on which `alpha` is nondecreasing.
    pub alpha_domain: Vec<u64>,
    /// Largest successor gap in the image of `D` over `monotone_domain`.
    pub d_image_gap: Option<u64>,
    /// Largest successor gap in the image of `alpha` over `alpha_domain`.
    pub alpha_image_gap: Option<u64>,
}

impl WindowProfile {
    fn assemble(n_max: u64, alpha_shift: Option<u64>, exact: bool, entries: Vec<ProfileEntry>) -> Self {
        let table = |pick: fn(&ProfileEntry) -> Value, domain: Option<&[u64]>| -> Vec<(u64, u64)> {
            entries
                .iter()
                .filter(|e| domain.map_or(true, |d| d.binary_search(&e.n).is_ok()))
                .filter_map(|e| pick(e).defined().map(|v| (e.n, v)))
                .collect()
        };
        let after_d = restrict_table(&table(|e| e.big_d, None), n_max).domain;
        let monotone_domain = restrict_table(&table(|e| e.big_a, Some(&after_d)), n_max).domain;
        let alpha_domain = restrict_table(&table(|e| e.alpha, None), n_max).domain;
        let image_gap = |pick: fn(&ProfileEntry) -> Value, domain: &[u64]| {
            let image: Vec<u64> = table(pick, Some(domain)).into_iter().map(|(_, v)| v).collect();
            max_successor_gap(&image)
        };
        let d_image_gap = image_gap(|e| e.big_d, &monotone_domain);
        let alpha_image_gap = image_gap(|e| e.alpha, &alpha_domain);
        WindowProfile {
            n_max,
            alpha_shift,
            exact,
            entries,
            monotone_domain,
            alpha_domain,
            d_image_gap,
            alpha_image_gap,
        }
    }

    pub fn entry(&self, n: u64) -> Option<&ProfileEntry> {
        self.entries.get(n as usize)
    }

    /// `{n: {dtilde, D, A, alpha, status}}` with `null` for undefined values.
    pub fn to_json(&self) -> serde_json::Value {
        let value = |v: Value| v.defined().map_or(serde_json::Value::Null, Into::into);
        let rows: BTreeMap<String, serde_json::Value> = self
            .entries
            .iter()
            .map(|e| {
                (
                    e.n.to_string(),
                    serde_json::json!({
                        "dtilde": value(e.dtilde),
                        "D": value(e.big_d),
                        "A": value(e.big_a),
                        "alpha": value(e.alpha),
                        "status": e.status(),
                    }),
                )
            })
            .collect();
        serde_json::to_value(rows).expect("profile rows serialize")
    }
}

/// Largest gap between consecutive distinct values.
fn max_successor_gap(values: &[u64]) -> Option<u64> {
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    sorted.windows(2).map(|w| w[1] - w[0]).max()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "branch", content = "value", rename_all = "kebab-case")]
pub enum RestrictBranch {
    /// Few distinct values: the fiber of the value taken at the largest
    /// domain element.
    ConstantFiber(u64),
    /// Points where `f` strictly exceeds every earlier value.
    StrictIncrease,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Restriction {
    pub branch: RestrictBranch,
    pub domain: Vec<u64>,
}

/// Restricts a tabulated function (ascending arguments) to a domain on which
/// it is nondecreasing. The constant-fiber branch is taken when the image has
/// at most `√bound` values.
pub fn restrict_table(table: &[(u64, u64)], bound: u64) -> Restriction {
    let mut image: Vec<u64> = table.iter().map(|&(_, v)| v).collect();
    image.sort_unstable();
    image.dedup();
    let k = image.len() as u64;
    match table.last() {
        Some(&(_, last)) if k.saturating_mul(k) <= bound => Restriction {
            branch: RestrictBranch::ConstantFiber(last),
            domain: table.iter().filter(|&&(_, v)| v == last).map(|&(x, _)| x).collect(),
        },
        _ => {
            let mut best: Option<u64> = None;
            let domain = table
                .iter()
                .filter(|&&(_, v)| {
                    let keep = best.map_or(true, |b| v > b);
                    best = Some(best.map_or(v, |b| b.max(v)));
                    keep
                })
                .map(|&(x, _)| x)
                .collect();
            Restriction {
                branch: RestrictBranch::StrictIncrease,
                domain,
            }
        }
    }
}

/// Restricts `u ∩ [0, bound]` to a subset on which `f` is nondecreasing.
pub fn monotone_restrict(
    u: &SetHandle,
    bound: u64,
    f: impl Fn(u64) -> u64,
) -> Result<(RestrictBranch, PrefixSet)> {
    let members = u.to_prefix(bound)?.members();
    let table: Vec<(u64, u64)> = members.into_iter().map(|x| (x, f(x))).collect();
    let r = restrict_table(&table, bound);
    Ok((r.branch, PrefixSet::from_members(bound, r.domain)?))
}

/// `X[a,b]` of a handle.
pub fn window(x: &SetHandle, a: u64, b: u64) -> Result<Window> {
    WindowEngine::new(x)?.window(a, b)
}

pub fn shift_match(x: &SetHandle, a: u64, b: u64, g: u64) -> Result<bool> {
    WindowEngine::new(x)?.shift_match(a, b, g)
}

pub fn dtilde(x: &SetHandle, n: u64) -> Result<Value> {
    Ok(WindowEngine::new(x)?.dtilde(n))
}

pub fn atilde(x: &SetHandle, n: u64, d: u64) -> Result<Value> {
    Ok(WindowEngine::new(x)?.atilde(n, d))
}

pub fn big_d(x: &SetHandle, n: u64) -> Result<Value> {
    Ok(WindowEngine::new(x)?.big_d(n))
}

pub fn big_a(x: &SetHandle, n: u64) -> Result<Value> {
    Ok(WindowEngine::new(x)?.big_a(n))
}

pub fn alpha(x: &SetHandle, n: u64, d: u64) -> Result<Value> {
    Ok(WindowEngine::new(x)?.alpha(n, d))
}

pub fn big_m(x: &SetHandle, at: u64, n: u64) -> Result<MaxMatch> {
    WindowEngine::new(x)?.big_m(at, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn engine(s: UpSet) -> WindowEngine {
        WindowEngine::new(&s.into()).unwrap()
    }

    fn evens() -> UpSet {
        UpSet::coset(2, 0).unwrap()
    }

    /// `(3ℕ ∩ [0, 50]) ∪ {even x ≥ 51}`.
    fn thirds_then_evens() -> UpSet {
        let e: Vec<u64> = (0..=50).filter(|x| x % 3 == 0).collect();
        UpSet::new(51, &e, 2, &[0]).unwrap()
    }

    #[test]
    fn window_examples() {
        let e = engine(evens());
        assert_eq!(e.window(0, 4).unwrap().content, vec![0, 2, 4]);
        assert_eq!(e.window(1, 5).unwrap().content, vec![1, 3]);
        assert!(engine(UpSet::empty()).window(3, 9).unwrap().content.is_empty());
        let prefix = WindowEngine::new(&evens().into())
            .unwrap()
            .window(2, 2)
            .unwrap();
        assert_eq!(prefix.content, vec![0]);
    }

    #[test]
    fn shift_match_examples() {
        let e = engine(evens());
        assert!(e.shift_match(0, 4, 2).unwrap());
        assert!(!e.shift_match(0, 4, 1).unwrap());
        let p = WindowEngine::new(&PrefixSet::from_members(10, [0, 2]).unwrap().into()).unwrap();
        assert!(matches!(
            p.shift_match(5, 8, 3),
            Err(Error::HorizonExceeded { query: 11, horizon: 10 })
        ));
    }

    #[test]
    fn dtilde_examples() {
        assert_eq!(engine(evens()).dtilde(3), Value::Defined(2));
        for n in 0..6 {
            assert_eq!(engine(UpSet::full()).dtilde(n), Value::Defined(1));
        }
        assert_eq!(engine(thirds_then_evens()).dtilde(6), Value::Defined(2));
    }

    #[test]
    fn atilde_examples() {
        let e = engine(evens());
        assert_eq!(e.atilde(3, 2), Value::Defined(0));
        assert_eq!(e.atilde(3, 1), Value::ProvablyUndefined);
        assert_eq!(engine(thirds_then_evens()).atilde(10, 2), Value::Defined(51));
        assert_eq!(engine(thirds_then_evens()).atilde(10, 3), Value::Defined(0));
    }

    #[test]
    fn twisted_examples() {
        assert_eq!(engine(evens()).twisted(5), (Value::Defined(2), Value::Defined(0)));
        assert_eq!(
            engine(thirds_then_evens()).twisted(10),
            (Value::Defined(3), Value::Defined(0))
        );
        assert_eq!(
            engine(UpSet::full()).twisted(4),
            (Value::Defined(1), Value::Defined(0))
        );
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(engine(evens()).alpha(4, 2), Value::Defined(0));
        assert_eq!(engine(UpSet::empty()).alpha(3, 1), Value::Defined(0));
    }

    #[test]
    fn big_m_examples() {
        let e = engine(evens());
        assert_eq!(e.big_m(0, 2).unwrap(), MaxMatch::InfiniteCertified);
        assert_eq!(e.big_m(0, 1).unwrap(), MaxMatch::Undefined);
        assert_eq!(e.big_m(3, 0).unwrap(), MaxMatch::InfiniteCertified);
        let s = engine(UpSet::new(5, &[1, 2, 3], 7, &[5]).unwrap());
        for x in 4..20 {
            assert_eq!(s.big_m(x, 7).unwrap(), MaxMatch::InfiniteCertified);
        }
        // 2 ∈ X but 9 ∉ X
        assert_eq!(s.big_m(2, 7).unwrap(), MaxMatch::Undefined);
        // 0 and 7 agree, 1 and 8 do not
        assert_eq!(s.big_m(0, 7).unwrap(), MaxMatch::Finite(7));
        let p = WindowEngine::new(&PrefixSet::from_members(20, (0..=20).step_by(2)).unwrap().into())
            .unwrap();
        assert_eq!(p.big_m(0, 2).unwrap(), MaxMatch::AtHorizon(20));
        assert!(p.big_m(15, 6).is_err());
    }

    #[test]
    fn first_bases_is_nondecreasing() {
        let e = engine(thirds_then_evens());
        for g in 1..10 {
            let row = e.first_bases(g, 30);
            let defined: Vec<u64> = row.iter().flatten().copied().collect();
            assert!(defined.windows(2).all(|w| w[0] <= w[1]));
            // once undefined, undefined for every larger n
            if let Some(first_none) = row.iter().position(Option::is_none) {
                assert!(row[first_none..].iter().all(Option::is_none));
            }
        }
    }

    #[test]
    fn restrict_examples() {
        let nat: SetHandle = UpSet::full().into();
        let (branch, set) = monotone_restrict(&nat, 100, |x| x / 2).unwrap();
        assert_eq!(branch, RestrictBranch::StrictIncrease);
        assert_eq!(set.members(), (0..=100).step_by(2).collect::<Vec<_>>());
        let (branch, set) = monotone_restrict(&nat, 100, |_| 7).unwrap();
        assert_eq!(branch, RestrictBranch::ConstantFiber(7));
        assert_eq!(set.members().len(), 101);
        let (_, set) = monotone_restrict(&nat, 100, |x| 3 * x + 1).unwrap();
        assert_eq!(set.members().len(), 101);
    }

    #[test]
    fn profile_matches_single_calls() {
        let e = engine(thirds_then_evens());
        let p = e.profile(12, Some(2));
        for entry in &p.entries {
            assert_eq!(entry.dtilde, e.dtilde(entry.n));
            assert_eq!((entry.big_d, entry.big_a), e.twisted(entry.n));
            assert_eq!(entry.alpha, e.alpha(entry.n, 2));
        }
        assert!(p.exact);
        let json = p.to_json();
        assert_eq!(json["10"]["D"], 3);
        assert_eq!(json["10"]["A"], 0);
        assert_eq!(json["10"]["status"], "defined");
    }
}
