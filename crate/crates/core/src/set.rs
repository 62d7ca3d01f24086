//! Ultimately periodic subsets of ℕ, finite prefixes, and membership oracles.
//!
//! An [`UpSet`] is described by a threshold `N`, an exceptional prefix
//! `E ⊆ [0, N)`, a period `d ≥ 1` and residues `R ⊆ [0, d)`:
//!
//! ```text
//! x ∈ S  ⇔  x ∈ E        if x < N
//!        ⇔  x mod d ∈ R  otherwise
//! ```
//!
//! Every operation returns the canonical representative: `d` is the least
//! eventual period and `N` the least threshold for it, so structural equality
//! coincides with set equality.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_integer::Integer;

use crate::error::{Error, Result};

/// Upper bound on `threshold + period` for any materialized representation.
pub const MAX_REPR: u64 = 1 << 24;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct UpSet {
    threshold: u64,
    period: u64,
    exceptional: Vec<bool>,
    residues: Vec<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoolOp {
    Union,
    Intersect,
    Difference,
}

impl BoolOp {
    fn apply(self, a: bool, b: bool) -> bool {
        match self {
            BoolOp::Union => a || b,
            BoolOp::Intersect => a && b,
            BoolOp::Difference => a && !b,
        }
    }
}

fn check_capacity(threshold: u64, period: u64) -> Result<()> {
    match threshold.checked_add(period) {
        Some(total) if total <= MAX_REPR => Ok(()),
        _ => Err(Error::Capacity(format!(
            "threshold {threshold} + period {period} exceeds {MAX_REPR}"
        ))),
    }
}

impl UpSet {
    /// Builds a set from its parts without canonicalizing it.
    pub fn from_parts(
        threshold: u64,
        exceptional: &[u64],
        period: u64,
        residues: &[u64],
    ) -> Result<Self> {
        if period == 0 {
            return Err(Error::InvalidLiteral("period must be at least 1".into()));
        }
        check_capacity(threshold, period)?;
        let mut e = vec![false; threshold as usize];
        for &x in exceptional {
            if x >= threshold {
                return Err(Error::InvalidLiteral(format!(
                    "exceptional point {x} is not below the threshold {threshold}"
                )));
            }
            e[x as usize] = true;
        }
        let mut r = vec![false; period as usize];
        for &x in residues {
            if x >= period {
                return Err(Error::InvalidLiteral(format!(
                    "residue {x} is not below the period {period}"
                )));
            }
            r[x as usize] = true;
        }
        Ok(UpSet {
            threshold,
            period,
            exceptional: e,
            residues: r,
        })
    }

    /// Builds a set from its parts and canonicalizes it.
    pub fn new(threshold: u64, exceptional: &[u64], period: u64, residues: &[u64]) -> Result<Self> {
        Ok(Self::from_parts(threshold, exceptional, period, residues)?.canonicalize())
    }

    fn from_flags(threshold: u64, exceptional: Vec<bool>, period: u64, residues: Vec<bool>) -> Self {
        debug_assert_eq!(exceptional.len() as u64, threshold);
        debug_assert_eq!(residues.len() as u64, period);
        UpSet {
            threshold,
            period,
            exceptional,
            residues,
        }
    }

    pub fn empty() -> Self {
        Self::from_flags(0, Vec::new(), 1, vec![false])
    }

    pub fn full() -> Self {
        Self::from_flags(0, Vec::new(), 1, vec![true])
    }

    /// `{x : x ≡ r (mod d)}`.
    pub fn coset(period: u64, residue: u64) -> Result<Self> {
        if period == 0 {
            return Err(Error::InvalidLiteral("period must be at least 1".into()));
        }
        Self::new(0, &[], period, &[residue % period])
    }

    /// A finite set.
    pub fn finite(points: &[u64]) -> Result<Self> {
        let threshold = points.iter().max().map_or(0, |m| m + 1);
        Self::new(threshold, points, 1, &[])
    }

    /// `[lo, ∞)`.
    pub fn at_least(lo: u64) -> Result<Self> {
        check_capacity(lo, 1)?;
        Ok(Self::from_flags(lo, vec![false; lo as usize], 1, vec![true]).canonicalize())
    }

    /// `[0, hi)`.
    pub fn below(hi: u64) -> Result<Self> {
        check_capacity(hi, 1)?;
        Ok(Self::from_flags(hi, vec![true; hi as usize], 1, vec![false]).canonicalize())
    }

    pub fn threshold(&self) -> u64 {
        self.threshold
    }

    pub fn period(&self) -> u64 {
        self.period
    }

    pub fn exceptional(&self) -> Vec<u64> {
        flags_to_list(&self.exceptional)
    }

    pub fn residues(&self) -> Vec<u64> {
        flags_to_list(&self.residues)
    }

    pub fn is_empty(&self) -> bool {
        !self.exceptional.iter().any(|&b| b) && !self.residues.iter().any(|&b| b)
    }

    pub fn is_finite(&self) -> bool {
        !self.residues.iter().any(|&b| b)
    }

    #[inline]
    pub fn contains(&self, x: u64) -> bool {
        if x < self.threshold {
            self.exceptional[x as usize]
        } else {
            self.residues[(x % self.period) as usize]
        }
    }

    /// Value the periodic rule predicts at `x`, ignoring the prefix.
    #[inline]
    pub fn tail_rule(&self, x: u64) -> bool {
        self.residues[(x % self.period) as usize]
    }

    /// Least `y > x` in the set, if any.
    pub fn next_after(&self, x: u64) -> Option<u64> {
        if self.is_finite() && x + 1 >= self.threshold {
            return None;
        }
        let start = x + 1;
        let end = start.max(self.threshold) + self.period;
        (start..end).find(|&y| self.contains(y))
    }

    pub fn is_canonical(&self) -> bool {
        self.canonicalize() == *self
    }

    /// Minimal period among the divisors of `d`, then minimal threshold.
    pub fn canonicalize(&self) -> Self {
        let d = self.period;
        let mut period = d;
        for p in divisors(d) {
            if (0..d).all(|i| self.residues[i as usize] == self.residues[(i % p) as usize]) {
                period = p;
                break;
            }
        }
        let residues: Vec<bool> = self.residues[..period as usize].to_vec();
        let mut threshold = self.threshold;
        while threshold > 0 {
            let x = threshold - 1;
            if self.exceptional[x as usize] == residues[(x % period) as usize] {
                threshold -= 1;
            } else {
                break;
            }
        }
        let exceptional = self.exceptional[..threshold as usize].to_vec();
        Self::from_flags(threshold, exceptional, period, residues)
    }

    /// Pointwise Boolean combination, aligned to `lcm` of the periods and
    /// `max` of the thresholds.
    pub fn combine(&self, other: &Self, op: BoolOp) -> Result<Self> {
        let period = self.period.lcm(&other.period);
        let threshold = self.threshold.max(other.threshold);
        check_capacity(threshold, period)?;
        let exceptional = (0..threshold)
            .map(|x| op.apply(self.contains(x), other.contains(x)))
            .collect();
        let residues = (0..period)
            .map(|i| {
                let x = threshold + (i + period - threshold % period) % period;
                op.apply(self.contains(x), other.contains(x))
            })
            .collect();
        Ok(Self::from_flags(threshold, exceptional, period, residues).canonicalize())
    }

    pub fn union(&self, other: &Self) -> Self {
        self.combine(other, BoolOp::Union)
            .expect("aligned representation exceeds MAX_REPR")
    }

    pub fn intersect(&self, other: &Self) -> Self {
        self.combine(other, BoolOp::Intersect)
            .expect("aligned representation exceeds MAX_REPR")
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.combine(other, BoolOp::Difference)
            .expect("aligned representation exceeds MAX_REPR")
    }

    pub fn complement(&self) -> Self {
        Self::from_flags(
            self.threshold,
            self.exceptional.iter().map(|b| !b).collect(),
            self.period,
            self.residues.iter().map(|b| !b).collect(),
        )
        .canonicalize()
    }

    /// `{x ≥ 0 : x + t ∈ S}`.
    pub fn shift(&self, t: i64) -> Result<Self> {
        let d = self.period;
        let threshold = if t >= 0 {
            self.threshold.saturating_sub(t as u64)
        } else {
            self.threshold + t.unsigned_abs()
        };
        check_capacity(threshold, d)?;
        let at = |x: u64| -> bool {
            let y = x as i128 + t as i128;
            y >= 0 && self.contains(y as u64)
        };
        let exceptional = (0..threshold).map(at).collect();
        let offset = t.rem_euclid(d as i64) as u64;
        let residues = (0..d)
            .map(|i| self.residues[((i + offset) % d) as usize])
            .collect();
        Ok(Self::from_flags(threshold, exceptional, d, residues).canonicalize())
    }

    /// Members in `[0, bound]`.
    pub fn members_upto(&self, bound: u64) -> impl Iterator<Item = u64> + '_ {
        (0..=bound).filter(move |&x| self.contains(x))
    }
}

impl fmt::Debug for UpSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn join(values: &[u64]) -> String {
    values
        .iter()
        .map(u64::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

impl fmt::Display for UpSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "up(N={}; E={}; d={}; R={})",
            self.threshold,
            join(&self.exceptional()),
            self.period,
            join(&self.residues())
        )
    }
}

impl FromStr for UpSet {
    type Err = Error;

    /// Parses `up(N=5; E=1,2,3; d=7; R=5)`. `E` and `R` may be empty or
    /// omitted; `N` defaults to 0 and `d` to 1. The result is canonical.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |m: &str| Error::InvalidLiteral(format!("{m} in `{s}`"));
        let body = s
            .trim()
            .strip_prefix("up(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| bad("expected up(...)"))?;
        let mut threshold = None;
        let mut period = None;
        let mut exceptional = Vec::new();
        let mut residues = Vec::new();
        for field in body.split(';').map(str::trim).filter(|f| !f.is_empty()) {
            let (key, value) = field.split_once('=').ok_or_else(|| bad("missing `=`"))?;
            let value = value.trim();
            let number = |v: &str| v.trim().parse::<u64>().map_err(|_| bad("expected a natural"));
            let list = |v: &str| -> Result<Vec<u64>> {
                v.split(',')
                    .map(str::trim)
                    .filter(|t| !t.is_empty())
                    .map(number)
                    .collect()
            };
            match key.trim() {
                "N" => threshold = Some(number(value)?),
                "d" => period = Some(number(value)?),
                "E" => exceptional = list(value)?,
                "R" => residues = list(value)?,
                other => return Err(bad(&format!("unknown field `{other}`"))),
            }
        }
        UpSet::new(
            threshold.unwrap_or(0),
            &exceptional,
            period.unwrap_or(1),
            &residues,
        )
    }
}

fn flags_to_list(flags: &[bool]) -> Vec<u64> {
    flags
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| i as u64)
        .collect()
}

/// Divisors of `n` in increasing order.
pub(crate) fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut i = 1;
    while i * i <= n {
        if n % i == 0 {
            small.push(i);
            if i != n / i {
                large.push(n / i);
            }
        }
        i += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Membership flags on `[0, horizon]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PrefixSet {
    horizon: u64,
    flags: Vec<bool>,
}

impl PrefixSet {
    pub fn from_flags(flags: Vec<bool>) -> Result<Self> {
        if flags.is_empty() {
            return Err(Error::Malformed("a prefix set covers at least [0, 0]".into()));
        }
        Ok(PrefixSet {
            horizon: flags.len() as u64 - 1,
            flags,
        })
    }

    pub fn from_members(horizon: u64, members: impl IntoIterator<Item = u64>) -> Result<Self> {
        check_capacity(horizon, 1)?;
        let mut flags = vec![false; horizon as usize + 1];
        for x in members {
            if x > horizon {
                return Err(Error::HorizonExceeded { query: x, horizon });
            }
            flags[x as usize] = true;
        }
        Ok(PrefixSet { horizon, flags })
    }

    pub fn from_predicate(horizon: u64, pred: impl Fn(u64) -> bool) -> Result<Self> {
        check_capacity(horizon, 1)?;
        Ok(PrefixSet {
            horizon,
            flags: (0..=horizon).map(pred).collect(),
        })
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn flags(&self) -> &[bool] {
        &self.flags
    }

    pub fn members(&self) -> Vec<u64> {
        flags_to_list(&self.flags)
    }

    /// Membership without the horizon check; `x` must be `≤ horizon`.
    #[inline]
    pub fn get(&self, x: u64) -> bool {
        self.flags[x as usize]
    }

    pub fn contains(&self, x: u64) -> Result<bool> {
        if x > self.horizon {
            return Err(Error::HorizonExceeded {
                query: x,
                horizon: self.horizon,
            });
        }
        Ok(self.get(x))
    }

    pub fn truncate(&self, bound: u64) -> Result<Self> {
        if bound > self.horizon {
            return Err(Error::HorizonExceeded {
                query: bound,
                horizon: self.horizon,
            });
        }
        Ok(PrefixSet {
            horizon: bound,
            flags: self.flags[..=bound as usize].to_vec(),
        })
    }
}

impl fmt::Debug for PrefixSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PrefixSet(B={}; {:?})", self.horizon, self.members())
    }
}

/// A membership predicate valid on `[0, horizon]`.
#[derive(Clone)]
pub struct Oracle {
    name: String,
    horizon: u64,
    pred: Arc<dyn Fn(u64) -> bool + Send + Sync>,
}

impl Oracle {
    pub fn new(
        name: impl Into<String>,
        horizon: u64,
        pred: impl Fn(u64) -> bool + Send + Sync + 'static,
    ) -> Self {
        Oracle {
            name: name.into(),
            horizon,
            pred: Arc::new(pred),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }
}

impl fmt::Debug for Oracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Oracle({}; B={})", self.name, self.horizon)
    }
}

/// Any set the analysis can consume.
#[derive(Clone, Debug)]
pub enum SetHandle {
    Periodic(UpSet),
    Prefix(PrefixSet),
    Oracle(Oracle),
}

impl From<UpSet> for SetHandle {
    fn from(s: UpSet) -> Self {
        SetHandle::Periodic(s)
    }
}

impl From<PrefixSet> for SetHandle {
    fn from(s: PrefixSet) -> Self {
        SetHandle::Prefix(s)
    }
}

impl From<Oracle> for SetHandle {
    fn from(s: Oracle) -> Self {
        SetHandle::Oracle(s)
    }
}

impl SetHandle {
    /// `None` means the handle answers for every natural.
    pub fn horizon(&self) -> Option<u64> {
        match self {
            SetHandle::Periodic(_) => None,
            SetHandle::Prefix(p) => Some(p.horizon),
            SetHandle::Oracle(o) => Some(o.horizon),
        }
    }

    pub fn as_periodic(&self) -> Option<&UpSet> {
        match self {
            SetHandle::Periodic(s) => Some(s),
            _ => None,
        }
    }

    fn check(&self, x: u64) -> Result<()> {
        match self.horizon() {
            Some(horizon) if x > horizon => Err(Error::HorizonExceeded { query: x, horizon }),
            _ => Ok(()),
        }
    }

    pub fn contains(&self, x: u64) -> Result<bool> {
        self.check(x)?;
        Ok(match self {
            SetHandle::Periodic(s) => s.contains(x),
            SetHandle::Prefix(p) => p.get(x),
            SetHandle::Oracle(o) => (o.pred)(x),
        })
    }

    /// Least member above `x`; `x` itself must be a member. `None` when no
    /// successor exists within the horizon.
    pub fn successor(&self, x: u64) -> Result<Option<u64>> {
        if !self.contains(x)? {
            return Err(Error::NotAMember(x));
        }
        match self {
            SetHandle::Periodic(s) => Ok(s.next_after(x)),
            _ => {
                let horizon = self.horizon().unwrap_or(u64::MAX);
                for y in x + 1..=horizon {
                    if self.contains(y)? {
                        return Ok(Some(y));
                    }
                }
                Ok(None)
            }
        }
    }

    /// Exact restriction to `[0, bound]`.
    pub fn to_prefix(&self, bound: u64) -> Result<PrefixSet> {
        self.check(bound)?;
        match self {
            SetHandle::Periodic(s) => PrefixSet::from_predicate(bound, |x| s.contains(x)),
            SetHandle::Prefix(p) => p.truncate(bound),
            SetHandle::Oracle(o) => PrefixSet::from_predicate(bound, |x| (o.pred)(x)),
        }
    }

    /// Boolean combination of two handles. Two periodic sets stay periodic;
    /// anything else is materialized on the common horizon.
    pub fn combine(&self, other: &SetHandle, op: BoolOp) -> Result<SetHandle> {
        if let (SetHandle::Periodic(a), SetHandle::Periodic(b)) = (self, other) {
            return Ok(a.combine(b, op)?.into());
        }
        let horizon = match (self.horizon(), other.horizon()) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => unreachable!(),
        };
        let a = self.to_prefix(horizon)?;
        let b = other.to_prefix(horizon)?;
        Ok(PrefixSet::from_predicate(horizon, |x| op.apply(a.get(x), b.get(x)))?.into())
    }

    pub fn complement(&self) -> Result<SetHandle> {
        match self {
            SetHandle::Periodic(s) => Ok(s.complement().into()),
            _ => {
                let horizon = self.horizon().expect("finite horizon");
                let p = self.to_prefix(horizon)?;
                Ok(PrefixSet::from_predicate(horizon, |x| !p.get(x))?.into())
            }
        }
    }

    /// `{x : x + t ∈ S}`; a finite horizon moves with the shift.
    pub fn shift(&self, t: i64) -> Result<SetHandle> {
        match self {
            SetHandle::Periodic(s) => Ok(s.shift(t)?.into()),
            _ => {
                let horizon = self.horizon().expect("finite horizon");
                let p = self.to_prefix(horizon)?;
                let new_horizon = horizon as i128 - t as i128;
                if new_horizon < 0 {
                    return Err(Error::HorizonExceeded {
                        query: t as u64,
                        horizon,
                    });
                }
                PrefixSet::from_predicate(new_horizon as u64, |x| {
                    let y = x as i128 + t as i128;
                    y >= 0 && p.get(y as u64)
                })
                .map(Into::into)
            }
        }
    }
}
