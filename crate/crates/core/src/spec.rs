//! Block-size sets and the parameters of a thinned exponential series.
//!
//! A series is described by two sets of positive integers, `A` (sizes whose
//! terms enter with a minus sign) and `B` (sizes entering with a plus sign),
//! together with the stretch parameters `b` (group size) and `r`. Every size
//! lives in the stretched support
//!
//! ```text
//! N* = { u*b : u >= 1, u = 0 or 1 (mod r) } = { b, rb, (r+1)b, 2rb, ... }
//! ```
//!
//! with `A` inside the stretched odds `(kr+1)b` and `B` inside the stretched
//! evens `krb`. For `b = 1, r = 2` this is the usual odd/even split of the
//! positive integers.
//!
//! Infinite sets are written as a finite explicit part plus arithmetic
//! progressions, which keeps membership decidable.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Arithmetic progression `{start + j*step : j >= 0}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "(u64, u64)", into = "(u64, u64)")]
pub struct Progression {
    pub start: u64,
    pub step: u64,
}

impl From<(u64, u64)> for Progression {
    fn from((start, step): (u64, u64)) -> Self {
        Progression { start, step }
    }
}

impl From<Progression> for (u64, u64) {
    fn from(p: Progression) -> Self {
        (p.start, p.step)
    }
}

impl Progression {
    pub fn contains(&self, k: u64) -> bool {
        k >= self.start && (k - self.start).is_multiple_of(self.step)
    }
}

#[derive(Deserialize)]
struct RawSizeSet {
    #[serde(default)]
    explicit: Vec<u64>,
    #[serde(default)]
    tails: Vec<Progression>,
}

/// A set of positive integers given by an explicit list and progression tails.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSizeSet")]
pub struct SizeSet {
    explicit: Vec<u64>,
    tails: Vec<Progression>,
}

impl TryFrom<RawSizeSet> for SizeSet {
    type Error = Error;

    fn try_from(raw: RawSizeSet) -> Result<Self> {
        SizeSet::new(raw.explicit, raw.tails)
    }
}

impl SizeSet {
    pub fn new(explicit: Vec<u64>, tails: Vec<Progression>) -> Result<Self> {
        if explicit.contains(&0) {
            return Err(Error::InvalidSizeSet("sizes must be positive".into()));
        }
        if let Some(p) = tails.iter().find(|p| p.start == 0 || p.step == 0) {
            return Err(Error::InvalidSizeSet(format!(
                "progression ({}, {}) needs positive start and step",
                p.start, p.step
            )));
        }
        let mut explicit = explicit;
        explicit.sort_unstable();
        explicit.dedup();
        let mut tails = tails;
        tails.sort_unstable_by_key(|p| (p.start, p.step));
        tails.dedup();
        Ok(SizeSet { explicit, tails })
    }

    pub fn empty() -> Self {
        SizeSet::default()
    }

    pub fn from_explicit<I: IntoIterator<Item = u64>>(items: I) -> Result<Self> {
        SizeSet::new(items.into_iter().collect(), Vec::new())
    }

    pub fn explicit(&self) -> &[u64] {
        &self.explicit
    }

    pub fn tails(&self) -> &[Progression] {
        &self.tails
    }

    pub fn is_empty(&self) -> bool {
        self.explicit.is_empty() && self.tails.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.tails.is_empty()
    }

    pub fn contains(&self, k: u64) -> bool {
        k >= 1 && (self.explicit.binary_search(&k).is_ok() || self.tails.iter().any(|p| p.contains(k)))
    }

    /// Members in `[1, horizon]`, sorted and without repeats.
    pub fn members_up_to(&self, horizon: u64) -> Vec<u64> {
        let mut out: Vec<u64> = self.explicit.iter().copied().take_while(|&k| k <= horizon).collect();
        for p in &self.tails {
            let mut k = p.start;
            while k <= horizon {
                out.push(k);
                k += p.step;
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn largest_explicit(&self) -> Option<u64> {
        self.explicit.last().copied()
    }

    fn largest_tail_start(&self) -> Option<u64> {
        self.tails.iter().map(|p| p.start).max()
    }
}

impl fmt::Display for SizeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.explicit.iter().map(u64::to_string).collect();
        parts.extend(self.tails.iter().map(|p| format!("{}+{}k", p.start, p.step)));
        write!(f, "{{{}}}", parts.join(","))
    }
}

fn default_group() -> u64 {
    1
}

fn default_stretch() -> u64 {
    2
}

#[derive(Deserialize)]
struct RawSpec {
    #[serde(rename = "A", default)]
    a: SizeSet,
    #[serde(rename = "B", default)]
    b: SizeSet,
    #[serde(rename = "b", default = "default_group")]
    group: u64,
    #[serde(rename = "r", default = "default_stretch")]
    stretch: u64,
}

/// The data `(A, B, b, r)` of a thinned exponential series
///
/// ```text
/// F(x) = 1 - sum_{a in A} x^a/a! + sum_{k in B} x^k/k!
/// ```
///
/// Serialized as `{"A": {...}, "B": {...}, "b": 1, "r": 2}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec")]
pub struct ThinnedSpec {
    #[serde(rename = "A")]
    a: SizeSet,
    #[serde(rename = "B")]
    b: SizeSet,
    #[serde(rename = "b")]
    group: u64,
    #[serde(rename = "r")]
    stretch: u64,
}

impl TryFrom<RawSpec> for ThinnedSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        ThinnedSpec::new(raw.a, raw.b, raw.group, raw.stretch)
    }
}

impl ThinnedSpec {
    pub fn new(a: SizeSet, b: SizeSet, group: u64, stretch: u64) -> Result<Self> {
        if group == 0 {
            return Err(Error::InvalidSpec("group size b must be positive".into()));
        }
        if stretch < 2 {
            return Err(Error::InvalidSpec(format!("stretch r must be at least 2, got {stretch}")));
        }
        let spec = ThinnedSpec { a, b, group, stretch };
        let period = spec.period();
        for &k in spec.a.explicit() {
            if !spec.is_stretched_odd(k) {
                return Err(Error::InvalidSpec(format!("{k} in A is not a stretched odd (k*r+1)*b")));
            }
        }
        for &k in spec.b.explicit() {
            if !spec.is_stretched_even(k) {
                return Err(Error::InvalidSpec(format!("{k} in B is not a stretched even k*r*b")));
            }
        }
        for p in spec.a.tails() {
            if !spec.is_stretched_odd(p.start) || p.step % period != 0 {
                return Err(Error::InvalidSpec(format!(
                    "progression ({}, {}) in A leaves the stretched odds",
                    p.start, p.step
                )));
            }
        }
        for p in spec.b.tails() {
            if !spec.is_stretched_even(p.start) || p.step % period != 0 {
                return Err(Error::InvalidSpec(format!(
                    "progression ({}, {}) in B leaves the stretched evens",
                    p.start, p.step
                )));
            }
        }
        Ok(spec)
    }

    /// Plain `b = 1, r = 2` spec from explicit lists.
    pub fn plain(a: &[u64], b: &[u64]) -> Result<Self> {
        ThinnedSpec::new(SizeSet::from_explicit(a.iter().copied())?, SizeSet::from_explicit(b.iter().copied())?, 1, 2)
    }

    /// Builds a spec from the union `A ∪ B`, routing each member to `A` or
    /// `B` by its class in the stretched support. `support_from` adjoins every
    /// support element from that point on.
    pub fn from_union(members: &[u64], support_from: Option<u64>, group: u64, stretch: u64) -> Result<Self> {
        if group == 0 || stretch < 2 {
            return Err(Error::InvalidSpec("need b >= 1 and r >= 2".into()));
        }
        let probe = ThinnedSpec { a: SizeSet::empty(), b: SizeSet::empty(), group, stretch };
        let mut odd = Vec::new();
        let mut even = Vec::new();
        for &k in members {
            if probe.is_stretched_odd(k) {
                odd.push(k);
            } else if probe.is_stretched_even(k) {
                even.push(k);
            } else {
                return Err(Error::InvalidSpec(format!("{k} is outside the stretched support")));
            }
        }
        let mut odd_tails = Vec::new();
        let mut even_tails = Vec::new();
        if let Some(start) = support_from {
            let first = probe.support_ceil(start);
            let second = probe.next_in_support(first);
            for s in [first, second] {
                let p = Progression { start: s, step: probe.period() };
                if probe.is_stretched_odd(s) {
                    odd_tails.push(p);
                } else {
                    even_tails.push(p);
                }
            }
        }
        ThinnedSpec::new(SizeSet::new(odd, odd_tails)?, SizeSet::new(even, even_tails)?, group, stretch)
    }

    pub fn a(&self) -> &SizeSet {
        &self.a
    }

    pub fn b_set(&self) -> &SizeSet {
        &self.b
    }

    /// Group size `b`.
    pub fn group(&self) -> u64 {
        self.group
    }

    /// Stretch `r`.
    pub fn stretch(&self) -> u64 {
        self.stretch
    }

    /// Gap `r*b` between consecutive stretched odds (or evens).
    pub fn period(&self) -> u64 {
        self.stretch * self.group
    }

    pub fn contains(&self, k: u64) -> bool {
        self.a.contains(k) || self.b.contains(k)
    }

    /// Coefficient of `x^k/k!` in `F`: `-1` on `A`, `+1` on `B`, else `0`
    /// (and `1` at `k = 0`).
    pub fn egf_coefficient(&self, k: u64) -> i8 {
        if k == 0 {
            1
        } else if self.a.contains(k) {
            -1
        } else if self.b.contains(k) {
            1
        } else {
            0
        }
    }

    pub fn in_support(&self, x: u64) -> bool {
        x >= 1 && x.is_multiple_of(self.group) && (x / self.group) % self.stretch <= 1
    }

    pub fn is_stretched_odd(&self, x: u64) -> bool {
        x >= 1 && x.is_multiple_of(self.group) && (x / self.group) % self.stretch == 1
    }

    pub fn is_stretched_even(&self, x: u64) -> bool {
        x >= 1 && x.is_multiple_of(self.group) && (x / self.group).is_multiple_of(self.stretch)
    }

    /// `n*(i)`: the `i`-th element of the stretched support, `n*(0) = 0`.
    pub fn support_at(&self, i: u64) -> u64 {
        if i.is_multiple_of(2) {
            i / 2 * self.stretch * self.group
        } else {
            ((i - 1) / 2 * self.stretch + 1) * self.group
        }
    }

    /// Inverse of [`support_at`](Self::support_at).
    pub fn support_index(&self, x: u64) -> Option<u64> {
        if x == 0 {
            return Some(0);
        }
        if !self.in_support(x) {
            return None;
        }
        let u = x / self.group;
        let (k, rem) = u.div_rem(&self.stretch);
        Some(if rem == 0 { 2 * k } else { 2 * k + 1 })
    }

    /// Smallest support element `>= x`.
    pub fn support_ceil(&self, x: u64) -> u64 {
        let mut y = x.max(1);
        while !self.in_support(y) {
            y += 1;
        }
        y
    }

    /// Support element following `x` (which must be in the support).
    pub fn next_in_support(&self, x: u64) -> u64 {
        let i = self.support_index(x).expect("element of the support");
        self.support_at(i + 1)
    }

    /// Support element preceding `x`, if any.
    pub fn prev_in_support(&self, x: u64) -> Option<u64> {
        let i = self.support_index(x).expect("element of the support");
        (i >= 2).then(|| self.support_at(i - 1))
    }

    /// `x ∈ A∪B` with its successor in the support outside `A∪B`.
    pub fn is_top(&self, x: u64) -> bool {
        self.contains(x) && !self.contains(self.next_in_support(x))
    }

    /// `x ∈ A∪B` with its predecessor in the support outside `A∪B`.
    pub fn is_bottom(&self, x: u64) -> bool {
        self.contains(x) && self.prev_in_support(x).is_none_or(|y| !self.contains(y))
    }

    /// Largest explicitly listed element of `A∪B`.
    pub fn largest_explicit(&self) -> Option<u64> {
        self.a.largest_explicit().max(self.b.largest_explicit())
    }

    /// A horizon past which membership in `A∪B` is periodic for at least two
    /// full periods, so interval shapes seen below it repeat forever.
    pub fn periodic_horizon(&self) -> u64 {
        let start = self
            .largest_explicit()
            .into_iter()
            .chain(self.a.largest_tail_start())
            .chain(self.b.largest_tail_start())
            .max()
            .unwrap_or(0);
        let period = self
            .a
            .tails()
            .iter()
            .chain(self.b.tails())
            .fold(self.period(), |acc, p| acc.lcm(&p.step));
        start + 2 * period + self.period()
    }

    /// Point from which every support element is provably in `A∪B`: needs
    /// progressions of step `r*b` on both the odd and the even side.
    fn full_support_from(&self) -> Option<u64> {
        let period = self.period();
        let odd = self.a.tails().iter().filter(|p| p.step == period).map(|p| p.start).min()?;
        let even = self.b.tails().iter().filter(|p| p.step == period).map(|p| p.start).min()?;
        Some(odd.max(even))
    }

    /// Non-fatal observations about the spec.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.a.contains(self.group) {
            out.push(format!("b = {} is not in A; combinatorial interpretations assume it is", self.group));
        }
        out
    }

    /// Decomposes `(A∪B) ∩ [1, horizon]` into maximal runs of consecutive
    /// support elements.
    pub fn maximal_intervals(&self, horizon: u64) -> Result<IntervalDecomp> {
        if let Some(largest) = self.largest_explicit() {
            if horizon < largest {
                return Err(Error::HorizonTooSmall { horizon, largest });
            }
        }
        let mut intervals = Vec::new();
        let mut open: Option<(u64, u64)> = None;
        let mut i = 1;
        let mut x = self.support_at(i);
        while x <= horizon {
            if self.contains(x) {
                open = Some(match open {
                    Some((bottom, _)) => (bottom, x),
                    None => (x, x),
                });
            } else if let Some((bottom, top)) = open.take() {
                intervals.push(Interval { bottom, top: Some(top), truncated: false });
            }
            i += 1;
            x = self.support_at(i);
        }
        if let Some((bottom, last)) = open {
            if self.contains(x) {
                if self.full_support_from().is_some_and(|t| last >= t) {
                    intervals.push(Interval { bottom, top: None, truncated: false });
                } else {
                    intervals.push(Interval { bottom, top: Some(last), truncated: true });
                }
            } else {
                intervals.push(Interval { bottom, top: Some(last), truncated: false });
            }
        }
        let tops = intervals.iter().filter(|iv| !iv.truncated).filter_map(|iv| iv.top).collect();
        let bottoms = intervals.iter().map(|iv| iv.bottom).collect();
        Ok(IntervalDecomp { intervals, tops, bottoms, horizon })
    }

    /// Whether every interval endpoint seen up to `horizon` is a stretched odd.
    pub fn is_odd_ended(&self, horizon: u64) -> Result<bool> {
        let d = self.maximal_intervals(horizon)?;
        Ok(d.bottoms.iter().chain(&d.tops).all(|&x| self.is_stretched_odd(x)))
    }

    /// Odd-endedness over all of `N`, decided at [`periodic_horizon`](Self::periodic_horizon).
    pub fn is_odd_ended_everywhere(&self) -> bool {
        self.is_odd_ended(self.periodic_horizon()).expect("periodic horizon covers explicit elements")
    }

    /// Rescales sizes to group units: `A∪B ⊆ b·Z` becomes a `b = 1` spec.
    pub fn in_units(&self) -> ThinnedSpec {
        if self.group == 1 {
            return self.clone();
        }
        let g = self.group;
        let scale = |s: &SizeSet| SizeSet {
            explicit: s.explicit.iter().map(|k| k / g).collect(),
            tails: s.tails.iter().map(|p| Progression { start: p.start / g, step: p.step / g }).collect(),
        };
        ThinnedSpec { a: scale(&self.a), b: scale(&self.b), group: 1, stretch: self.stretch }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

impl fmt::Display for ThinnedSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A={} B={} b={} r={}", self.a, self.b, self.group, self.stretch)
    }
}

/// A maximal run of consecutive support elements of `A∪B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Interval {
    pub bottom: u64,
    /// `None` for an interval that provably never ends.
    pub top: Option<u64>,
    /// Reached the horizon without a proof of unboundedness; `top` is then
    /// only the last element seen.
    pub truncated: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntervalDecomp {
    pub intervals: Vec<Interval>,
    pub tops: Vec<u64>,
    pub bottoms: Vec<u64>,
    pub horizon: u64,
}

impl IntervalDecomp {
    /// Index of the interval holding `k`, if any.
    pub fn interval_of(&self, k: u64) -> Option<usize> {
        self.intervals.iter().position(|iv| {
            k >= iv.bottom && k <= self.horizon && iv.top.is_none_or(|t| k <= t)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn union(members: &[u64], from: Option<u64>) -> ThinnedSpec {
        ThinnedSpec::from_union(members, from, 1, 2).unwrap()
    }

    #[test]
    fn membership() {
        let s = SizeSet::from_explicit([1, 3]).unwrap();
        assert!(s.contains(3));
        let t = SizeSet::new(vec![], vec![Progression { start: 4, step: 2 }]).unwrap();
        assert!(t.contains(10));
        assert!(!t.contains(5));
        assert!(!t.contains(2));
    }

    #[test]
    fn members_are_deduplicated() {
        let s = SizeSet::new(vec![4, 6, 6], vec![Progression { start: 4, step: 2 }]).unwrap();
        assert_eq!(s.members_up_to(10), vec![4, 6, 8, 10]);
    }

    #[test]
    fn rejects_bad_sets() {
        assert!(SizeSet::from_explicit([0, 1]).is_err());
        assert!(SizeSet::new(vec![], vec![Progression { start: 3, step: 0 }]).is_err());
        assert!(ThinnedSpec::plain(&[2], &[]).is_err());
        assert!(ThinnedSpec::plain(&[1], &[3]).is_err());
        let odd_step = SizeSet::new(vec![], vec![Progression { start: 1, step: 1 }]).unwrap();
        assert!(ThinnedSpec::new(odd_step, SizeSet::empty(), 1, 2).is_err());
    }

    #[test]
    fn single_interval() {
        for m in 1..6 {
            let members: Vec<u64> = (1..2 * m).collect();
            let d = union(&members, None).maximal_intervals(4 * m).unwrap();
            assert_eq!(d.intervals.len(), 1);
            assert_eq!(d.tops, vec![2 * m - 1]);
            assert_eq!(d.bottoms, vec![1]);
        }
    }

    #[test]
    fn four_intervals_with_unbounded_tail() {
        let spec = union(&[1, 5, 9, 10, 11, 12, 13], Some(19));
        let d = spec.maximal_intervals(40).unwrap();
        assert_eq!(d.intervals.len(), 4);
        assert_eq!(d.tops, vec![1, 5, 13]);
        assert_eq!(d.bottoms, vec![1, 5, 9, 19]);
        assert_eq!(d.intervals[3].top, None);
        assert!(spec.is_odd_ended(40).unwrap());
    }

    #[test]
    fn stretched_r6_example() {
        let spec = ThinnedSpec::from_union(&[1, 7, 12, 13], None, 1, 6).unwrap();
        let d = spec.maximal_intervals(30).unwrap();
        assert_eq!(d.bottoms, vec![1, 7]);
        assert_eq!(d.tops, vec![1, 13]);
        assert!(spec.is_odd_ended(30).unwrap());
        assert_eq!(spec.a().explicit(), &[1, 7, 13]);
        assert_eq!(spec.b_set().explicit(), &[12]);
    }

    #[test]
    fn odd_ended_small_cases() {
        assert!(ThinnedSpec::plain(&[1, 3], &[2]).unwrap().is_odd_ended(10).unwrap());
        assert!(!ThinnedSpec::plain(&[1], &[2]).unwrap().is_odd_ended(10).unwrap());
    }

    #[test]
    fn horizon_below_explicit_is_rejected() {
        let spec = ThinnedSpec::plain(&[1, 3, 9], &[]).unwrap();
        assert!(matches!(spec.maximal_intervals(5), Err(Error::HorizonTooSmall { .. })));
    }

    #[test]
    fn truncated_when_tail_is_sparser_than_support() {
        // evens 2,6,10,... never fill the support, so [1,3] style blocks recur
        let a = SizeSet::new(vec![], vec![Progression { start: 1, step: 2 }]).unwrap();
        let b = SizeSet::new(vec![], vec![Progression { start: 2, step: 4 }]).unwrap();
        let spec = ThinnedSpec::new(a, b, 1, 2).unwrap();
        let d = spec.maximal_intervals(11).unwrap();
        // 1,2,3 | 5,6,7 | 9,10,11 -> 12 missing so the last one closes
        assert_eq!(d.intervals.len(), 3);
        assert!(d.intervals.iter().all(|iv| !iv.truncated));
        let d = spec.maximal_intervals(10).unwrap();
        assert!(d.intervals.last().unwrap().truncated);
        assert!(spec.is_odd_ended_everywhere());
    }

    #[test]
    fn support_index_round_trip() {
        for (b, r) in [(1, 2), (1, 3), (2, 2), (3, 5)] {
            let spec = ThinnedSpec::new(SizeSet::empty(), SizeSet::empty(), b, r).unwrap();
            for i in 0..40 {
                assert_eq!(spec.support_index(spec.support_at(i)), Some(i));
            }
        }
    }

    #[test]
    fn json_round_trip_and_defaults() {
        let spec = ThinnedSpec::from_json(r#"{"A":{"explicit":[1,3]},"B":{"explicit":[]}}"#).unwrap();
        assert_eq!(spec, ThinnedSpec::plain(&[1, 3], &[]).unwrap());
        let again = ThinnedSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(again, spec);
        let tailed = ThinnedSpec::from_json(r#"{"A":{"explicit":[1]},"B":{"tails":[[4,2]]},"b":1,"r":2}"#).unwrap();
        assert!(tailed.contains(100));
        assert!(ThinnedSpec::from_json(r#"{"A":{"explicit":[2]}}"#).is_err());
    }

    #[test]
    fn warns_when_group_missing_from_a() {
        let spec = ThinnedSpec::plain(&[3], &[]).unwrap();
        assert_eq!(spec.warnings().len(), 1);
        assert!(ThinnedSpec::plain(&[1], &[]).unwrap().warnings().is_empty());
    }
}
