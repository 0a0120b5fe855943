//! Sign-reversing involutions on admissible ordered set partitions.
//!
//! Both algorithms look at the last *active* block and either move (merge or
//! split, then stop) or skip some blocks and continue on a shorter prefix.
//! Skips only ever compare relative order, so the active prefix is tracked
//! as an index instead of relabeling the remaining elements.
//!
//! For group size `b > 1` every block is cut into consecutive chunks of `b`
//! elements and the algorithms move whole chunks; sizes are measured in
//! units of `b`.

use std::fmt;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::partitions::{enumerate, EnumBudget, OrderedSetPartition};
use crate::series::egf_reciprocal_coeffs;
use crate::spec::ThinnedSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Case {
    A,
    B,
    C,
    D,
    E,
    A1,
    A2,
    B1,
    B2,
    B3,
    B4,
    B5,
    C1,
    C2,
    #[serde(rename = "D-stretched")]
    DStretched,
}

impl Case {
    pub fn label(self) -> &'static str {
        match self {
            Case::A => "A",
            Case::B => "B",
            Case::C => "C",
            Case::D => "D",
            Case::E => "E",
            Case::A1 => "A1",
            Case::A2 => "A2",
            Case::B1 => "B1",
            Case::B2 => "B2",
            Case::B3 => "B3",
            Case::B4 => "B4",
            Case::B5 => "B5",
            Case::C1 => "C1",
            Case::C2 => "C2",
            Case::DStretched => "D-stretched",
        }
    }

    /// Merges and splits; every other case is a skip.
    pub fn is_move(self) -> bool {
        matches!(self, Case::A | Case::D | Case::A2 | Case::B2 | Case::C1 | Case::C2)
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One decision of the algorithm. `block` is the 1-based position of the
/// last active block when the case fired.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Step {
    pub case: Case,
    pub block: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Moved,
    Fixed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvolutionTrace {
    #[serde(serialize_with = "serialize_display")]
    pub input: OrderedSetPartition,
    #[serde(serialize_with = "serialize_display")]
    pub output: OrderedSetPartition,
    pub steps: Vec<Step>,
    pub outcome: Outcome,
}

fn serialize_display<S: serde::Serializer>(p: &OrderedSetPartition, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(p)
}

impl InvolutionTrace {
    pub fn is_fixed(&self) -> bool {
        self.outcome == Outcome::Fixed
    }

    pub fn cases(&self) -> Vec<Case> {
        self.steps.iter().map(|s| s.case).collect()
    }

    /// Human-readable rendering: one line per step, then before/after.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for step in &self.steps {
            out.push_str(&format!("case={} at block {}\n", step.case, step.block));
        }
        out.push_str(&format!("before: {}\n", self.input));
        out.push_str(&format!("after: {}\n", self.output));
        out.push_str(match self.outcome {
            Outcome::Moved => "outcome: moved\n",
            Outcome::Fixed => "outcome: fixed\n",
        });
        out
    }
}

/// Working copy of the blocks plus the chunk width.
struct Work {
    blocks: Vec<Vec<u32>>,
    b: usize,
}

impl Work {
    fn new(p: &OrderedSetPartition, spec: &ThinnedSpec) -> Result<Self> {
        let b = spec.group() as usize;
        for block in p.blocks() {
            let size = block.len();
            if size % b != 0 {
                return Err(Error::InadmissibleBlock { size, reason: format!("not a multiple of the group size {b}") });
            }
            if !spec.contains(size as u64) {
                return Err(Error::InadmissibleBlock { size, reason: "size is not in A∪B".into() });
            }
        }
        Ok(Work { blocks: p.blocks().to_vec(), b })
    }

    fn units(&self, i: usize) -> usize {
        self.blocks[i].len() / self.b
    }

    fn size(&self, i: usize) -> u64 {
        self.blocks[i].len() as u64
    }

    /// Every element of block `j` exceeds every element of block `i`.
    fn in_order(&self, i: usize, j: usize) -> bool {
        self.blocks[j][0] > *self.blocks[i].last().expect("blocks are nonempty")
    }

    /// Appends blocks `from+1..=to` onto block `from`.
    fn merge(&mut self, from: usize, to: usize) {
        let tail: Vec<u32> = self.blocks.drain(from + 1..=to).flatten().collect();
        self.blocks[from].extend(tail);
    }

    /// Splits the last `chunks` chunks of block `i` off as singleton blocks.
    fn split(&mut self, i: usize, chunks: usize) {
        let cut = self.blocks[i].len() - chunks * self.b;
        let tail = self.blocks[i].split_off(cut);
        let pieces: Vec<Vec<u32>> = tail.chunks(self.b).map(<[u32]>::to_vec).collect();
        self.blocks.splice(i + 1..i + 1, pieces);
    }

    fn finish(self, input: &OrderedSetPartition, steps: Vec<Step>, outcome: Outcome) -> InvolutionTrace {
        let output = match outcome {
            Outcome::Fixed => input.clone(),
            Outcome::Moved => OrderedSetPartition::from_blocks_unchecked(input.n(), self.blocks),
        };
        InvolutionTrace { input: input.clone(), output, steps, outcome }
    }
}

/// The `r = 2` algorithm (cases A to E).
pub fn involute_r2(p: &OrderedSetPartition, spec: &ThinnedSpec) -> Result<InvolutionTrace> {
    if spec.stretch() != 2 {
        return Err(Error::Precondition(format!("involute_r2 needs r = 2, got r = {}", spec.stretch())));
    }
    let mut w = Work::new(p, spec)?;
    let b = w.b as u64;
    let mut steps = Vec::new();
    let mut end = w.blocks.len();
    loop {
        if end == 0 {
            return Ok(w.finish(p, steps, Outcome::Fixed));
        }
        let last = end - 1;
        if w.units(last) == 1 {
            if last == 0 {
                return Ok(w.finish(p, steps, Outcome::Fixed));
            }
            let prev = last - 1;
            if !w.in_order(prev, last) {
                steps.push(Step { case: Case::B, block: end });
                end -= 1;
            } else if spec.contains(w.size(prev) + b) {
                steps.push(Step { case: Case::A, block: end });
                w.merge(prev, last);
                return Ok(w.finish(p, steps, Outcome::Moved));
            } else {
                steps.push(Step { case: Case::C, block: end });
                end -= 2;
            }
        } else if spec.contains(w.size(last) - b) {
            steps.push(Step { case: Case::D, block: end });
            w.split(last, 1);
            return Ok(w.finish(p, steps, Outcome::Moved));
        } else {
            steps.push(Step { case: Case::E, block: end });
            end -= 1;
        }
    }
}

/// The stretched algorithm (cases A1 to D) for any `r >= 2`.
///
/// A singleton that sits closer to the start of the partition than the
/// `r - 1` positions the B cases inspect is skipped as in B5.
pub fn involute_stretched(p: &OrderedSetPartition, spec: &ThinnedSpec) -> Result<InvolutionTrace> {
    let mut w = Work::new(p, spec)?;
    let r = spec.stretch() as usize;
    let b = w.b as u64;
    let mut steps = Vec::new();
    let mut end = w.blocks.len();
    let not_odd_ended = |size: u64| Error::NotOddEnded(format!("a merge would create a block of size {size} outside A∪B"));
    loop {
        if end == 0 {
            return Ok(w.finish(p, steps, Outcome::Fixed));
        }
        let last = end - 1;
        if w.units(last) == 1 {
            if last == 0 {
                return Ok(w.finish(p, steps, Outcome::Fixed));
            }
            let prev = last - 1;
            if w.units(prev) % r == 0 {
                if !w.in_order(prev, last) {
                    steps.push(Step { case: Case::A1, block: end });
                    end -= 1;
                    continue;
                }
                let merged = w.size(prev) + b;
                if !spec.contains(merged) {
                    return Err(not_odd_ended(merged));
                }
                steps.push(Step { case: Case::A2, block: end });
                w.merge(prev, last);
                return Ok(w.finish(p, steps, Outcome::Moved));
            }
            let singles_ok = (1..=r - 2).all(|j| j <= last && w.units(last - j) == 1);
            if !singles_ok || last < r - 1 {
                steps.push(Step { case: Case::B5, block: end });
                end -= 1;
                continue;
            }
            let head = last - (r - 1);
            if w.units(head) % r == 0 {
                steps.push(Step { case: Case::B4, block: end });
                end -= 1;
                continue;
            }
            if !(head..last).all(|i| w.in_order(i, i + 1)) {
                steps.push(Step { case: Case::B1, block: end });
                end -= 1;
                continue;
            }
            if spec.is_top(w.size(head)) {
                steps.push(Step { case: Case::B3, block: end });
                end = head;
                continue;
            }
            let merged = w.size(head) + (r as u64 - 1) * b;
            if !spec.contains(merged) {
                return Err(not_odd_ended(merged));
            }
            steps.push(Step { case: Case::B2, block: end });
            w.merge(head, last);
            return Ok(w.finish(p, steps, Outcome::Moved));
        }
        let size = w.size(last);
        if spec.is_bottom(size) {
            steps.push(Step { case: Case::DStretched, block: end });
            end -= 1;
        } else if w.units(last) % r == 0 {
            steps.push(Step { case: Case::C1, block: end });
            w.split(last, r - 1);
            return Ok(w.finish(p, steps, Outcome::Moved));
        } else {
            steps.push(Step { case: Case::C2, block: end });
            w.split(last, 1);
            return Ok(w.finish(p, steps, Outcome::Moved));
        }
    }
}

/// Dispatches on `r`: the dedicated algorithm for `r = 2`, the stretched
/// one otherwise.
pub fn involute(p: &OrderedSetPartition, spec: &ThinnedSpec) -> Result<InvolutionTrace> {
    if spec.stretch() == 2 {
        involute_r2(p, spec)
    } else {
        involute_stretched(p, spec)
    }
}

/// Whether the involution fixes `p`.
pub fn is_good(p: &OrderedSetPartition, spec: &ThinnedSpec) -> Result<bool> {
    Ok(involute(p, spec)?.is_fixed())
}

/// Direct characterization of the fixed points, without running the
/// involution. Declines specs that are not odd-ended or miss `b ∈ A`.
///
/// Blocks are grouped into maximal increasing runs. Inside a run, read left
/// to right: some leading singletons, then groups made of a larger block `X`
/// followed by `j` singletons. With `rem = j mod r` when `1` is a top (and
/// `rem = j` with `j <= r - 1` for every singleton stretch otherwise):
/// each `X` must be a top or a bottom, a top that is not a bottom needs
/// `rem = r - 1` and a bottom that is not a top needs `rem != r - 1`.
pub fn is_good_structural(p: &OrderedSetPartition, spec: &ThinnedSpec) -> Result<bool> {
    check_structural_spec(spec)?;
    let g = spec.group() as usize;
    for block in p.blocks() {
        if block.len() % g != 0 || !spec.contains(block.len() as u64) {
            return Err(Error::InadmissibleBlock { size: block.len(), reason: "size is not in A∪B".into() });
        }
    }
    let units = spec.in_units();
    let rules = RunRules::new(&units);
    let blocks = p.blocks();
    let mut start = 0;
    while start < blocks.len() {
        let mut stop = start + 1;
        while stop < blocks.len() && blocks[stop][0] > *blocks[stop - 1].last().expect("nonempty") {
            stop += 1;
        }
        let sizes: Vec<u64> = blocks[start..stop].iter().map(|b| (b.len() / g) as u64).collect();
        if !rules.accepts(&sizes) {
            return Ok(false);
        }
        start = stop;
    }
    Ok(true)
}

pub(crate) fn check_structural_spec(spec: &ThinnedSpec) -> Result<()> {
    if !spec.a().contains(spec.group()) {
        return Err(Error::Precondition("the fixed-point characterization needs b ∈ A".into()));
    }
    if !spec.is_odd_ended_everywhere() {
        return Err(Error::NotOddEnded("the fixed-point characterization is only established for odd-ended sets".into()));
    }
    Ok(())
}

/// Goodness rules for a single increasing run, in units.
pub(crate) struct RunRules<'a> {
    spec: &'a ThinnedSpec,
    r: u64,
    one_is_top: bool,
}

/// Class of a non-singleton block inside a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Anchor {
    Both,
    TopOnly,
    BottomOnly,
}

impl<'a> RunRules<'a> {
    pub(crate) fn new(units: &'a ThinnedSpec) -> Self {
        RunRules { spec: units, r: units.stretch(), one_is_top: units.is_top(1) }
    }

    pub(crate) fn anchor(&self, x: u64) -> Option<Anchor> {
        if x <= 1 || !self.spec.contains(x) {
            return None;
        }
        match (self.spec.is_top(x), self.spec.is_bottom(x)) {
            (true, true) => Some(Anchor::Both),
            (true, false) => Some(Anchor::TopOnly),
            (false, true) => Some(Anchor::BottomOnly),
            (false, false) => None,
        }
    }

    /// Whether `j` singletons may open the run.
    pub(crate) fn leading_ok(&self, j: u64) -> bool {
        self.one_is_top || j < self.r
    }

    /// Whether `j` singletons may follow a block of the given class.
    pub(crate) fn trailing_ok(&self, anchor: Anchor, j: u64) -> bool {
        if !self.one_is_top && j >= self.r {
            return false;
        }
        let rem = j % self.r;
        match anchor {
            Anchor::Both => true,
            Anchor::TopOnly => rem == self.r - 1,
            Anchor::BottomOnly => rem != self.r - 1,
        }
    }

    pub(crate) fn accepts(&self, sizes: &[u64]) -> bool {
        let lead = sizes.iter().take_while(|&&s| s == 1).count();
        if !self.leading_ok(lead as u64) {
            return false;
        }
        let mut i = lead;
        while i < sizes.len() {
            let Some(anchor) = self.anchor(sizes[i]) else {
                return false;
            };
            let j = sizes[i + 1..].iter().take_while(|&&s| s == 1).count();
            if !self.trailing_ok(anchor, j as u64) {
                return false;
            }
            i += 1 + j;
        }
        true
    }
}

/// Number of partitions of `[n]` the involution fixes.
pub fn fixed_point_count(n: u32, spec: &ThinnedSpec, budget: EnumBudget) -> Result<BigInt> {
    let parts: Vec<OrderedSetPartition> = enumerate(n, spec, budget)?.collect();
    let fixed = parts
        .par_iter()
        .map(|p| involute(p, spec).map(|t| t.is_fixed() as u64))
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(BigInt::from(fixed))
}

/// Outcome of the exhaustive property sweep behind `verify`.
#[derive(Clone, Debug, Default, Serialize)]
pub struct VerifyReport {
    pub n_max: u32,
    pub partitions_checked: u64,
    pub fixed_points: Vec<String>,
    pub coefficients: Vec<String>,
    pub structural_checked: bool,
    pub r2_cross_checked: bool,
    pub failures: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

const MAX_REPORTED_FAILURES: usize = 20;

/// Runs every involution property on every admissible partition of `[n]`
/// for `n <= n_max`: involution law, permutation preservation, sign
/// reversal, positivity of fixed points, fixed count against the series,
/// structural agreement (when the characterization applies) and agreement
/// of the two algorithms when `r = 2`.
pub fn verify_suite(n_max: u32, spec: &ThinnedSpec, budget: EnumBudget) -> Result<VerifyReport> {
    let structural = check_structural_spec(spec).is_ok();
    let cross = spec.stretch() == 2 && spec.is_odd_ended_everywhere();
    let coeffs = egf_reciprocal_coeffs(spec, n_max as usize);
    let mut report = VerifyReport { n_max, structural_checked: structural, r2_cross_checked: cross, ..Default::default() };
    for n in 0..=n_max {
        let parts: Vec<OrderedSetPartition> = enumerate(n, spec, budget)?.collect();
        let results: Vec<(bool, Vec<String>)> = parts
            .par_iter()
            .map(|p| check_one(p, spec, structural, cross))
            .collect::<Result<_>>()?;
        let mut fixed = 0u64;
        for (is_fixed, failures) in results {
            fixed += is_fixed as u64;
            for f in failures {
                if report.failures.len() < MAX_REPORTED_FAILURES {
                    report.failures.push(f);
                }
            }
        }
        report.partitions_checked += parts.len() as u64;
        let c = coeffs.coeff(n as usize);
        if structural && BigInt::from(fixed) != c {
            report.failures.push(format!("n={n}: {fixed} fixed points but c_n = {c}"));
        }
        report.fixed_points.push(fixed.to_string());
        report.coefficients.push(c.to_string());
    }
    Ok(report)
}

fn check_one(p: &OrderedSetPartition, spec: &ThinnedSpec, structural: bool, cross: bool) -> Result<(bool, Vec<String>)> {
    let mut failures = Vec::new();
    let t = involute(p, spec)?;
    let q = &t.output;
    let back = involute(q, spec)?;
    if back.output != *p {
        failures.push(format!("{p} -> {q} -> {} is not an involution", back.output));
    }
    if q.underlying_permutation() != p.underlying_permutation() {
        failures.push(format!("{p} -> {q} changes the underlying permutation"));
    }
    if t.is_fixed() {
        if structural && !p.is_positive(spec) {
            failures.push(format!("{p} is fixed but negative"));
        }
    } else if p.b_block_count(spec).abs_diff(q.b_block_count(spec)) != 1 {
        failures.push(format!("{p} -> {q} does not reverse the sign"));
    }
    if structural && is_good_structural(p, spec)? != t.is_fixed() {
        failures.push(format!("{p}: structural goodness disagrees with fixedness"));
    }
    if cross {
        let s = involute_stretched(p, spec)?;
        if s.output != t.output {
            failures.push(format!("{p}: r=2 gives {q}, stretched gives {}", s.output));
        }
    }
    Ok((t.is_fixed(), failures))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn part(s: &str) -> OrderedSetPartition {
        s.parse().unwrap()
    }

    fn run(s: &str, spec: &ThinnedSpec) -> InvolutionTrace {
        involute(&part(s), spec).unwrap()
    }

    #[test]
    fn r2_moves() {
        let spec = ThinnedSpec::plain(&[1, 3], &[2]).unwrap();
        let t = run("234/6/1/57/89", &spec);
        assert_eq!(t.output.to_string(), "234/6/1/57/8/9");
        assert_eq!(t.cases(), vec![Case::D]);
        let back = run("234/6/1/57/8/9", &spec);
        assert_eq!(back.output.to_string(), "234/6/1/57/89");
        assert_eq!(back.cases(), vec![Case::A]);
        let t = run("134/28/567/9", &spec);
        assert_eq!(t.output.to_string(), "134/2/8/567/9");
        assert_eq!(t.cases(), vec![Case::C, Case::D]);
        assert_eq!(t.steps[1].block, 2);
    }

    #[test]
    fn empty_and_single() {
        let spec = ThinnedSpec::plain(&[1, 3], &[2]).unwrap();
        let t = involute(&OrderedSetPartition::empty(), &spec).unwrap();
        assert!(t.is_fixed() && t.steps.is_empty());
        assert!(run("1", &spec).is_fixed());
    }

    #[test]
    fn rejects_inadmissible_blocks() {
        let spec = ThinnedSpec::plain(&[1, 3], &[2]).unwrap();
        assert!(matches!(involute(&part("1234"), &spec), Err(Error::InadmissibleBlock { size: 4, .. })));
        let grouped = ThinnedSpec::new(
            crate::spec::SizeSet::from_explicit([2, 6]).unwrap(),
            crate::spec::SizeSet::from_explicit([4]).unwrap(),
            2,
            2,
        )
        .unwrap();
        assert!(involute(&part("123/4"), &grouped).is_err());
    }

    #[test]
    fn r2_requires_r2() {
        let spec = ThinnedSpec::from_union(&[1, 3, 4], None, 1, 3).unwrap();
        assert!(involute_r2(&part("1/2/3"), &spec).is_err());
    }

    #[test]
    fn stretched_matches_r2_on_small_inputs() {
        let spec = ThinnedSpec::plain(&[1, 3, 5], &[2, 4]).unwrap();
        for p in enumerate(6, &spec, EnumBudget::default()).unwrap() {
            assert_eq!(involute_r2(&p, &spec).unwrap().output, involute_stretched(&p, &spec).unwrap().output);
        }
    }

    #[test]
    fn structural_examples() {
        let spec = ThinnedSpec::plain(&[1, 3, 5], &[4]).unwrap();
        assert!(is_good_structural(&part("1/234/5/6"), &spec).unwrap());
        assert!(!is_good_structural(&part("123/4/5/6"), &spec).unwrap());
        let not_odd = ThinnedSpec::plain(&[1], &[2]).unwrap();
        assert!(is_good_structural(&part("1/2"), &not_odd).is_err());
    }

    #[test]
    fn fixed_counts_match_series() {
        let spec = ThinnedSpec::plain(&[1, 3], &[2]).unwrap();
        let c = egf_reciprocal_coeffs(&spec, 6);
        for n in 0..=6 {
            assert_eq!(fixed_point_count(n, &spec, EnumBudget::default()).unwrap(), c.coeff(n as usize));
        }
    }

    #[test]
    fn trace_render() {
        let spec = ThinnedSpec::plain(&[1, 3], &[2]).unwrap();
        let text = run("134/28/567/9", &spec).render();
        assert!(text.starts_with("case=C at block 4\ncase=D at block 2\n"));
        assert!(text.contains("before: 134/28/567/9\nafter: 134/2/8/567/9\n"));
    }

    #[test]
    fn suite_passes_on_small_spec() {
        let spec = ThinnedSpec::plain(&[1, 3], &[2]).unwrap();
        let report = verify_suite(5, &spec, EnumBudget::default()).unwrap();
        assert!(report.passed(), "{:?}", report.failures);
        assert!(report.structural_checked && report.r2_cross_checked);
    }
}
