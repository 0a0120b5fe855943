//! Ordered set partitions of `[n]` with restricted block sizes.
//!
//! This is the brute-force side of every identity in the crate: the signed
//! count over all admissible partitions must reproduce the series
//! coefficients, and the involutions act on these objects.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::perm::{next_permutation, run_lengths, Permutations};
use crate::series::PascalRow;
use crate::spec::ThinnedSpec;

/// Ordered Bell number `Fubini(10)`, the default enumeration cap.
pub const FUBINI_10: u128 = 102_247_563;

/// Largest `n` for which permutations are enumerated by default.
pub const DEFAULT_MAX_PERM_N: u32 = 10;

/// Upper bound on how many objects an exhaustive enumeration may visit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumBudget {
    pub max_objects: u128,
}

impl Default for EnumBudget {
    fn default() -> Self {
        EnumBudget { max_objects: FUBINI_10 }
    }
}

impl EnumBudget {
    pub fn unlimited() -> Self {
        EnumBudget { max_objects: u128::MAX }
    }

    fn check(&self, count: &BigInt) -> Result<()> {
        if *count > BigInt::from(self.max_objects) {
            return Err(Error::BudgetExceeded { count: count.to_string(), cap: self.max_objects });
        }
        Ok(())
    }
}

/// A sequence of nonempty blocks covering `[n]`, each listed increasingly.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrderedSetPartition {
    n: u32,
    blocks: Vec<Vec<u32>>,
}

impl OrderedSetPartition {
    pub fn new(blocks: Vec<Vec<u32>>) -> Result<Self> {
        let n: usize = blocks.iter().map(Vec::len).sum();
        let mut seen = vec![false; n + 1];
        for block in &blocks {
            if block.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            if block.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidPartition(format!("block {block:?} is not strictly increasing")));
            }
            for &x in block {
                let i = x as usize;
                if i == 0 || i > n || seen[i] {
                    return Err(Error::InvalidPartition(format!("blocks do not partition [1, {n}]")));
                }
                seen[i] = true;
            }
        }
        Ok(OrderedSetPartition { n: n as u32, blocks })
    }

    pub(crate) fn from_blocks_unchecked(n: u32, blocks: Vec<Vec<u32>>) -> Self {
        debug_assert_eq!(blocks.iter().map(Vec::len).sum::<usize>(), n as usize);
        OrderedSetPartition { n, blocks }
    }

    pub fn empty() -> Self {
        OrderedSetPartition { n: 0, blocks: Vec::new() }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<u32>] {
        &self.blocks
    }

    pub fn into_blocks(self) -> Vec<Vec<u32>> {
        self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }

    /// Concatenation of the blocks, left to right.
    pub fn underlying_permutation(&self) -> Vec<u32> {
        self.blocks.iter().flatten().copied().collect()
    }

    /// Number of blocks whose size lies in `B`.
    pub fn b_block_count(&self, spec: &ThinnedSpec) -> usize {
        self.blocks.iter().filter(|b| spec.b_set().contains(b.len() as u64)).count()
    }

    /// Sign `(-1)^{#B-blocks}`: true for the positive class.
    pub fn is_positive(&self, spec: &ThinnedSpec) -> bool {
        self.b_block_count(spec).is_multiple_of(2)
    }

    /// Every block size lies in `A∪B`.
    pub fn is_admissible(&self, spec: &ThinnedSpec) -> bool {
        self.blocks.iter().all(|b| spec.contains(b.len() as u64))
    }
}

impl fmt::Display for OrderedSetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.n <= 9 { "" } else { "," };
        let rendered: Vec<String> = self
            .blocks
            .iter()
            .map(|b| b.iter().map(u32::to_string).collect::<Vec<_>>().join(sep))
            .collect();
        f.write_str(&rendered.join("/"))
    }
}

/// Parses slash notation: `234/6/1/57/89`, or `1,10/2,3` once `n >= 10`.
impl FromStr for OrderedSetPartition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(OrderedSetPartition::empty());
        }
        let comma = s.contains(',');
        let blocks = s
            .split('/')
            .map(|block| {
                let bad = || Error::InvalidPartition(format!("cannot parse block {block:?}"));
                if comma {
                    block.split(',').map(|t| t.trim().parse::<u32>().map_err(|_| bad())).collect()
                } else {
                    block.chars().map(|c| c.to_digit(10).ok_or_else(bad)).collect()
                }
            })
            .collect::<Result<Vec<Vec<u32>>>>()?;
        OrderedSetPartition::new(blocks)
    }
}

/// Compositions of `n` with every part in `A∪B`, lexicographic by parts.
pub fn admissible_compositions(n: usize, spec: &ThinnedSpec) -> Vec<Vec<usize>> {
    let parts: Vec<usize> = (1..=n).filter(|&k| spec.contains(k as u64)).collect();
    let mut out = Vec::new();
    let mut stack = Vec::new();
    fn walk(rest: usize, parts: &[usize], stack: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(stack.clone());
            return;
        }
        for &p in parts.iter().take_while(|&&p| p <= rest) {
            stack.push(p);
            walk(rest - p, parts, stack, out);
            stack.pop();
        }
    }
    walk(n, &parts, &mut stack, &mut out);
    out
}

/// Number of admissible ordered set partitions of `[n]`:
/// `sum_{s in A∪B} C(n, s) * count(n - s)`.
pub fn admissible_count(n: usize, spec: &ThinnedSpec) -> BigInt {
    let mut counts = vec![BigInt::one()];
    let mut row = PascalRow::new();
    for m in 1..=n {
        row.advance();
        let mut acc = BigInt::zero();
        for s in 1..=m {
            if spec.contains(s as u64) {
                acc += row.get(s) * &counts[m - s];
            }
        }
        counts.push(acc);
    }
    counts.swap_remove(n)
}

/// Stream over the admissible ordered set partitions of `[n]`.
///
/// Composition first, then the element distribution: for a composition
/// `(L_1, ..., L_k)` the partitions correspond to words over `{0..k}` with
/// `L_i` copies of `i` (element `j` goes to block `word[j-1]`), visited in
/// lexicographic order.
#[derive(Clone, Debug)]
pub struct Partitions {
    n: u32,
    compositions: Vec<Vec<usize>>,
    index: usize,
    labels: Vec<u32>,
}

impl Partitions {
    fn new(n: u32, compositions: Vec<Vec<usize>>) -> Self {
        let labels = compositions.first().map(|c| initial_labels(c)).unwrap_or_default();
        Partitions { n, compositions, index: 0, labels }
    }

    /// Distributions for a single composition.
    pub fn for_composition(composition: Vec<usize>) -> Self {
        let n = composition.iter().sum::<usize>() as u32;
        Partitions::new(n, vec![composition])
    }
}

fn initial_labels(composition: &[usize]) -> Vec<u32> {
    composition.iter().enumerate().flat_map(|(i, &len)| std::iter::repeat_n(i as u32, len)).collect()
}

impl Iterator for Partitions {
    type Item = OrderedSetPartition;

    fn next(&mut self) -> Option<OrderedSetPartition> {
        let composition = self.compositions.get(self.index)?;
        let mut blocks: Vec<Vec<u32>> = composition.iter().map(|&len| Vec::with_capacity(len)).collect();
        for (j, &label) in self.labels.iter().enumerate() {
            blocks[label as usize].push(j as u32 + 1);
        }
        if !next_permutation(&mut self.labels) {
            self.index += 1;
            if let Some(c) = self.compositions.get(self.index) {
                self.labels = initial_labels(c);
            }
        }
        Some(OrderedSetPartition::from_blocks_unchecked(self.n, blocks))
    }
}

/// Every admissible ordered set partition of `[n]`, each exactly once.
pub fn enumerate(n: u32, spec: &ThinnedSpec, budget: EnumBudget) -> Result<Partitions> {
    budget.check(&admissible_count(n as usize, spec))?;
    Ok(Partitions::new(n, admissible_compositions(n as usize, spec)))
}

/// `(|P^pos|, |P^neg|)` for `[n]`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SignedCount {
    #[serde(serialize_with = "crate::serde_decimal")]
    pub pos: BigInt,
    #[serde(serialize_with = "crate::serde_decimal")]
    pub neg: BigInt,
}

impl SignedCount {
    pub fn difference(&self) -> BigInt {
        &self.pos - &self.neg
    }
}

/// Brute-force signed count; compositions are farmed out across the
/// current rayon pool and summed.
pub fn signed_count(n: u32, spec: &ThinnedSpec, budget: EnumBudget) -> Result<SignedCount> {
    budget.check(&admissible_count(n as usize, spec))?;
    let (pos, neg) = admissible_compositions(n as usize, spec)
        .into_par_iter()
        .map(|composition| {
            let negative = composition.iter().filter(|&&k| spec.b_set().contains(k as u64)).count() % 2 == 1;
            let mut count = 0u64;
            for p in Partitions::for_composition(composition) {
                debug_assert_eq!(p.is_positive(spec), !negative);
                count += 1;
            }
            if negative {
                (0, count)
            } else {
                (count, 0)
            }
        })
        .reduce(|| (0u64, 0u64), |x, y| (x.0 + y.0, x.1 + y.1));
    Ok(SignedCount { pos: pos.into(), neg: neg.into() })
}

/// Permutations of `[n]` all of whose maximal increasing runs satisfy `allowed`.
pub fn count_perms_by_run_rule<F>(n: u32, allowed: F, max_n: u32) -> Result<BigInt>
where
    F: Fn(usize) -> bool,
{
    if n > max_n {
        return Err(Error::BudgetExceeded { count: format!("{n}! permutations"), cap: max_n as u128 });
    }
    let count = Permutations::new(n).filter(|p| run_lengths(p).into_iter().all(&allowed)).count();
    Ok(count.into())
}
