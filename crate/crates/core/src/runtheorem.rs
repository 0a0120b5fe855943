//! Run compositions and the run-weighted route to reciprocal coefficients.
//!
//! If `1/g(x) = Σ w_n x^n` for the ordinary series `g` built from the same
//! sets, then the exponential reciprocal has `b_n = Σ_{L ⊨ n} w_L β(L)`,
//! where `β(L)` counts permutations with run composition `L`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::involution::check_structural_spec;
use crate::series::{factorials, ogf_reciprocal, CoeffSeq, SeriesKind};
use crate::spec::ThinnedSpec;

/// Largest `n` for which `b_n` is summed over compositions directly.
pub const DIRECT_SUM_MAX_N: usize = 12;

/// Longest composition handled by coarsening inclusion–exclusion.
pub const INCLUSION_EXCLUSION_MAX_LEN: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Composition {
    parts: Vec<usize>,
}

impl Composition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::Precondition("composition parts must be positive".into()));
        }
        Ok(Composition { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn n(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Positions `p` (1-based) with `σ(p) > σ(p+1)` for any permutation
    /// with this run composition.
    pub fn descent_set(&self) -> Vec<usize> {
        let mut acc = 0;
        let mut out = Vec::with_capacity(self.parts.len().saturating_sub(1));
        for &p in &self.parts[..self.parts.len().saturating_sub(1)] {
            acc += p;
            out.push(acc);
        }
        out
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(usize::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Lengths of the maximal increasing runs of `sigma`.
pub fn run_composition(sigma: &[u32]) -> Composition {
    Composition { parts: crate::perm::run_lengths(sigma) }
}

/// All `2^{n-1}` compositions of `n` (one empty composition for `n = 0`).
pub fn compositions(n: usize) -> impl Iterator<Item = Composition> {
    let count: u64 = if n == 0 { 1 } else { 1 << (n - 1) };
    (0..count).map(move |mask| {
        let mut parts = Vec::new();
        let mut len = 0;
        for i in 0..n {
            len += 1;
            if i + 1 == n || mask >> i & 1 == 1 {
                parts.push(len);
                len = 0;
            }
        }
        Composition { parts }
    })
}

/// `β(L)`: inclusion–exclusion over coarsenings for short compositions,
/// the descent-pattern DP otherwise.
pub fn beta(l: &Composition) -> BigInt {
    if l.len() <= INCLUSION_EXCLUSION_MAX_LEN {
        beta_inclusion_exclusion(l)
    } else {
        beta_dp(l)
    }
}

/// `Σ_M (-1)^{len L - len M} n!/(M_1!⋯M_k!)` over coarsenings `M` of `L`.
pub fn beta_inclusion_exclusion(l: &Composition) -> BigInt {
    let n = l.n();
    let fact = factorials(n);
    if l.is_empty() {
        return BigInt::one();
    }
    let gaps = l.len() - 1;
    let mut total = BigInt::zero();
    for keep in 0u64..1 << gaps {
        let mut denom = BigInt::one();
        let mut run = l.parts[0];
        for (i, &p) in l.parts[1..].iter().enumerate() {
            if keep >> i & 1 == 1 {
                denom *= &fact[run];
                run = p;
            } else {
                run += p;
            }
        }
        denom *= &fact[run];
        let term = &fact[n] / denom;
        if (gaps - keep.count_ones() as usize).is_multiple_of(2) {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

/// Counts permutations with descent set exactly that of `L`, tracking the
/// relative rank of the last entry.
pub fn beta_dp(l: &Composition) -> BigInt {
    let n = l.n();
    if n == 0 {
        return BigInt::one();
    }
    let descents = l.descent_set();
    let mut is_descent = vec![false; n];
    for d in descents {
        is_descent[d] = true;
    }
    let mut dp = vec![BigInt::one()];
    for i in 1..n {
        let mut next = vec![BigInt::zero(); i + 1];
        if is_descent[i] {
            let mut acc = BigInt::zero();
            for j in (0..=i).rev() {
                if j < i {
                    acc += &dp[j];
                }
                next[j] = acc.clone();
            }
        } else {
            let mut acc = BigInt::zero();
            for j in 0..=i {
                next[j] = acc.clone();
                if j < i {
                    acc += &dp[j];
                }
            }
        }
        dp = next;
    }
    dp.into_iter().sum()
}

/// `Σ_{L ⊨ n} β(L) Π w_{L_i}`, i.e. the sum over permutations of `[n]` of
/// the product of `w` over run lengths. `w[0]` is ignored.
pub fn weighted_run_sum(n: usize, w: &[BigInt]) -> BigInt {
    if n <= DIRECT_SUM_MAX_N {
        weighted_run_sum_compositions(n, w)
    } else {
        weighted_run_sum_dp(n, w)
    }
}

pub fn weighted_run_sum_compositions(n: usize, w: &[BigInt]) -> BigInt {
    let mut total = BigInt::zero();
    for l in compositions(n) {
        let weight: BigInt = l.parts.iter().map(|&p| w[p].clone()).product();
        if !weight.is_zero() {
            total += weight * beta(&l);
        }
    }
    total
}

/// Insertion DP over permutations: state is the relative rank of the last
/// entry and the length of the current run; a descent closes the run and
/// multiplies in its weight. `O(n^3)` big-integer additions.
pub fn weighted_run_sum_dp(n: usize, w: &[BigInt]) -> BigInt {
    if n == 0 {
        return BigInt::one();
    }
    // dp[j][len]: j = rank of last entry (0-based) among i entries; len in 1..=i.
    let mut dp = vec![vec![BigInt::zero(); 2]];
    dp[0][1] = BigInt::one();
    for i in 1..n {
        let mut next = vec![vec![BigInt::zero(); i + 2]; i + 1];
        // Ascent: new entry ranks above the old last one.
        for len in 1..=i {
            let mut acc = BigInt::zero();
            for (j, row) in next.iter_mut().enumerate() {
                row[len + 1] = acc.clone();
                if j < i {
                    acc += &dp[j][len];
                }
            }
        }
        // Descent: close the current run, weighting it.
        let closed: Vec<BigInt> = dp
            .iter()
            .map(|row| row.iter().enumerate().skip(1).map(|(len, v)| v * &w[len]).sum())
            .collect();
        let mut acc = BigInt::zero();
        for j in (0..=i).rev() {
            if j < i {
                acc += &closed[j];
            }
            next[j][1] = acc.clone();
        }
        dp = next;
    }
    dp.iter().flat_map(|row| row.iter().enumerate().skip(1).map(|(len, v)| v * &w[len])).sum()
}

/// Ordinary series `g(x) = 1 - Σ_A x^a + Σ_B x^b` up to `x^n`.
pub fn ogf_of_spec(spec: &ThinnedSpec, n: usize) -> CoeffSeq {
    CoeffSeq::ogf((0..=n as u64).map(|k| BigInt::from(spec.egf_coefficient(k))))
}

#[derive(Clone, Debug, Serialize)]
pub struct RunTheoremReport {
    /// Coefficients of `1/g`.
    #[serde(serialize_with = "serialize_vec")]
    pub w: Vec<BigInt>,
    /// `b_n = Σ_L w_L β(L)`.
    #[serde(serialize_with = "serialize_vec")]
    pub b: Vec<BigInt>,
    pub w_nonnegative: bool,
}

fn serialize_vec<S: serde::Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(BigInt::to_string))
}

impl RunTheoremReport {
    pub fn b_series(&self) -> CoeffSeq {
        CoeffSeq::new(SeriesKind::Egf, self.b.clone())
    }
}

/// `b_0..b_n` through the ordinary reciprocal and run weights.
pub fn run_theorem_coeffs(spec: &ThinnedSpec, n: usize) -> RunTheoremReport {
    let w = ogf_reciprocal(&ogf_of_spec(spec, n), n).expect("constant term is 1").into_values();
    let b = (0..=n).map(|k| weighted_run_sum(k, &w)).collect();
    let w_nonnegative = w.iter().all(|x| !x.is_negative());
    RunTheoremReport { w, b, w_nonnegative }
}

/// Part sizes `S` and optional first-block sizes whose compositions count
/// the coefficients of `1/g`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructuredS {
    pub s: Vec<u64>,
    pub first_block_extras: Vec<u64>,
    pub horizon: u64,
}

impl StructuredS {
    /// Compositions of `n` with parts in `S`, optionally preceded by one
    /// block from the extras.
    pub fn count(&self, n: u64) -> BigInt {
        self.counts(n as usize).swap_remove(n as usize)
    }

    /// [`count`](Self::count) for every `0..=n`.
    pub fn counts(&self, n: usize) -> Vec<BigInt> {
        let mut comp = vec![BigInt::one()];
        for m in 1..=n {
            let v = self.s.iter().filter(|&&s| s as usize <= m).map(|&s| comp[m - s as usize].clone()).sum();
            comp.push(v);
        }
        (0..=n)
            .map(|m| {
                let extra: BigInt = self
                    .first_block_extras
                    .iter()
                    .filter(|&&e| e as usize <= m)
                    .map(|&e| comp[m - e as usize].clone())
                    .sum();
                &comp[m] + extra
            })
            .collect()
    }
}

/// Builds `S` from the interval decomposition of `A∪B` in support-index
/// space: each later interval `[c, d]` contributes `n*(c-1) + jb` for
/// `1 <= j <= r-1`, and every bounded interval contributes `n*(d+1)`.
pub fn structured_s(spec: &ThinnedSpec, horizon: u64) -> Result<StructuredS> {
    check_structural_spec(spec)?;
    let horizon = horizon.max(spec.largest_explicit().unwrap_or(0));
    let decomp = spec.maximal_intervals(horizon)?;
    let b = spec.group();
    let r = spec.stretch();
    let mut s = Vec::new();
    for (k, iv) in decomp.intervals.iter().enumerate() {
        if k > 0 {
            let c = spec.support_index(iv.bottom).expect("interval bottoms lie in the support");
            let base = spec.support_at(c - 1);
            s.extend((1..r).map(|j| base + j * b));
        }
        if let (Some(top), false) = (iv.top, iv.truncated) {
            let d = spec.support_index(top).expect("interval tops lie in the support");
            s.push(spec.support_at(d + 1));
        }
    }
    s.retain(|&x| x <= horizon);
    s.sort_unstable();
    s.dedup();
    let first_block_extras = (1..r).map(|j| j * b).collect();
    Ok(StructuredS { s, first_block_extras, horizon })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::egf_reciprocal_coeffs;

    fn comp(parts: &[usize]) -> Composition {
        Composition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn run_compositions() {
        assert_eq!(run_composition(&[1, 3, 2]).parts(), &[2, 1]);
        assert_eq!(run_composition(&[1, 2, 3, 4]).parts(), &[4]);
        assert_eq!(run_composition(&[3, 2, 1]).parts(), &[1, 1, 1]);
    }

    #[test]
    fn beta_small_values() {
        assert_eq!(beta(&comp(&[2, 1])), BigInt::from(2));
        assert_eq!(beta(&comp(&[5])), BigInt::one());
        assert_eq!(beta(&comp(&[1, 1, 1, 1])), BigInt::one());
        assert_eq!(beta(&comp(&[])), BigInt::one());
        assert_eq!(beta_dp(&comp(&[2, 1])), BigInt::from(2));
    }

    #[test]
    fn beta_paths_agree() {
        for n in 0..=9 {
            for l in compositions(n) {
                assert_eq!(beta_inclusion_exclusion(&l), beta_dp(&l), "{l}");
            }
        }
    }

    #[test]
    fn composition_counts() {
        assert_eq!(compositions(0).count(), 1);
        assert_eq!(compositions(5).count(), 16);
        assert!(compositions(6).all(|c| c.n() == 6));
        assert!(Composition::new(vec![1, 0]).is_err());
    }

    #[test]
    fn weighted_sum_paths_agree() {
        let w: Vec<BigInt> = [1, 1, -2, 3, 0, 5, 1, 2, -1, 4, 1, 1, 2, 3, 1].into_iter().map(BigInt::from).collect();
        for n in 0..=12 {
            assert_eq!(weighted_run_sum_compositions(n, &w), weighted_run_sum_dp(n, &w), "n={n}");
        }
    }

    #[test]
    fn matches_recurrence() {
        let spec = ThinnedSpec::plain(&[1, 3], &[2]).unwrap();
        let report = run_theorem_coeffs(&spec, 14);
        assert_eq!(report.b_series(), egf_reciprocal_coeffs(&spec, 14));
        assert!(report.w_nonnegative);
    }

    #[test]
    fn w_sequence_example() {
        let spec = ThinnedSpec::plain(&[1, 5, 7], &[6]).unwrap();
        let report = run_theorem_coeffs(&spec, 5);
        let expected: Vec<BigInt> = [1, 1, 1, 1, 1, 2].into_iter().map(BigInt::from).collect();
        assert_eq!(report.w, expected);
    }

    #[test]
    fn even_interval_gives_negative_w() {
        let spec = ThinnedSpec::plain(&[1], &[2]).unwrap();
        assert!(!run_theorem_coeffs(&spec, 6).w_nonnegative);
    }

    #[test]
    fn structured_s_full_interval() {
        for m in 1..=4u64 {
            let members: Vec<u64> = (1..2 * m).collect();
            let spec = ThinnedSpec::from_union(&members, None, 1, 2).unwrap();
            let s = structured_s(&spec, 40).unwrap();
            assert_eq!(s.s, vec![2 * m]);
            assert_eq!(s.first_block_extras, vec![1]);
            let w = run_theorem_coeffs(&spec, 40).w;
            assert_eq!(s.counts(40), w);
        }
    }

    #[test]
    fn structured_s_whole_support() {
        let spec = ThinnedSpec::from_union(&[], Some(1), 1, 3).unwrap();
        let s = structured_s(&spec, 30).unwrap();
        assert!(s.s.is_empty());
        let expected: Vec<BigInt> = (0..=30).map(|k| BigInt::from((k < 3) as u8)).collect();
        assert_eq!(s.counts(30), expected);
    }

    #[test]
    fn structured_s_rejects_non_odd_ended() {
        let spec = ThinnedSpec::plain(&[1], &[2]).unwrap();
        assert!(structured_s(&spec, 10).is_err());
    }
}
