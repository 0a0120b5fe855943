//! Run-length weights: `w_ℓ` counts the good partitions of a single
//! increasing run of length `ℓ`, and a permutation weighs the product of
//! `w` over its maximal increasing runs.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::involution::{check_structural_spec, Anchor, RunRules};
use crate::perm::{run_lengths, Permutations};
use crate::runtheorem::weighted_run_sum;
use crate::spec::ThinnedSpec;

#[derive(Clone, Debug, Serialize)]
pub struct WeightTable {
    #[serde(skip)]
    spec: ThinnedSpec,
    #[serde(serialize_with = "serialize_vec")]
    w: Vec<BigInt>,
}

fn serialize_vec<S: serde::Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(BigInt::to_string))
}

impl WeightTable {
    /// `w_0..=w_max_len` for an odd-ended spec with `b ∈ A`.
    pub fn new(spec: &ThinnedSpec, max_len: usize) -> Result<Self> {
        check_structural_spec(spec)?;
        let g = spec.group() as usize;
        let units = unit_weights(&spec.in_units(), max_len / g);
        let w = (0..=max_len).map(|l| if l % g == 0 { units[l / g].clone() } else { BigInt::zero() }).collect();
        Ok(WeightTable { spec: spec.clone(), w })
    }

    pub fn spec(&self) -> &ThinnedSpec {
        &self.spec
    }

    pub fn values(&self) -> &[BigInt] {
        &self.w
    }

    pub fn max_len(&self) -> usize {
        self.w.len() - 1
    }

    pub fn get(&self, len: usize) -> Option<&BigInt> {
        self.w.get(len)
    }

    /// CSV with header `ℓ,w_ℓ`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("ℓ,w_ℓ\n");
        for (l, v) in self.w.iter().enumerate() {
            out.push_str(&format!("{l},{v}\n"));
        }
        out
    }
}

/// DP over the run read left to right. `tail[t]` counts fillings of `t`
/// units by groups (anchor block, trailing singletons); `after[c][t]` sums
/// `tail[t - j]` over the singleton counts `j` allowed after class `c`.
fn unit_weights(units: &ThinnedSpec, max_len: usize) -> Vec<BigInt> {
    let rules = RunRules::new(units);
    let classes = [Anchor::Both, Anchor::TopOnly, Anchor::BottomOnly];
    let anchors: Vec<(usize, usize)> = (2..=max_len as u64)
        .filter_map(|x| rules.anchor(x).map(|a| (x as usize, classes.iter().position(|&c| c == a).expect("known class"))))
        .collect();
    let mut tail: Vec<BigInt> = Vec::with_capacity(max_len + 1);
    let mut after: Vec<Vec<BigInt>> = vec![Vec::with_capacity(max_len + 1); classes.len()];
    for t in 0..=max_len {
        let v = if t == 0 {
            BigInt::one()
        } else {
            anchors.iter().take_while(|(x, _)| *x <= t).map(|&(x, c)| after[c][t - x].clone()).sum()
        };
        tail.push(v);
        for (c, &class) in classes.iter().enumerate() {
            let s = (0..=t).filter(|&j| rules.trailing_ok(class, j as u64)).map(|j| tail[t - j].clone()).sum();
            after[c].push(s);
        }
    }
    (0..=max_len)
        .map(|l| (0..=l).filter(|&j| rules.leading_ok(j as u64)).map(|j| tail[l - j].clone()).sum())
        .collect()
}

/// `w_ℓ` for a single length.
pub fn weight_ell(len: usize, spec: &ThinnedSpec) -> Result<BigInt> {
    Ok(WeightTable::new(spec, len)?.w.swap_remove(len))
}

/// Product of `w` over the maximal increasing runs of `sigma`.
pub fn weight_sigma(sigma: &[u32], table: &WeightTable) -> Result<BigInt> {
    let runs = run_lengths(sigma);
    let mut out = BigInt::one();
    for l in runs {
        let w = table
            .get(l)
            .ok_or_else(|| Error::Precondition(format!("weight table stops at {}, run of length {l}", table.max_len())))?;
        out *= w;
    }
    Ok(out)
}

/// How [`weighted_perm_sum`] evaluates `Σ_σ w_σ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SumPath {
    /// Visit every permutation of `[n]`; refused above `max_n`.
    BruteForce { max_n: u32 },
    /// Group permutations by run composition.
    Compositions,
}

pub fn weighted_perm_sum(n: usize, table: &WeightTable, path: SumPath) -> Result<BigInt> {
    if n > table.max_len() {
        return Err(Error::Precondition(format!("weight table stops at {}, need {n}", table.max_len())));
    }
    match path {
        SumPath::BruteForce { max_n } => {
            if n as u32 > max_n {
                return Err(Error::BudgetExceeded { count: format!("{n}! permutations"), cap: max_n as u128 });
            }
            Permutations::new(n as u32).map(|sigma| weight_sigma(&sigma, table)).sum()
        }
        SumPath::Compositions => Ok(weighted_run_sum(n, table.values())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn small_examples() {
        let spec = ThinnedSpec::plain(&[1, 3], &[]).unwrap();
        let t = WeightTable::new(&spec, 4).unwrap();
        assert_eq!(t.values(), big(&[1, 1, 1, 2, 3]).as_slice());
        assert_eq!(weight_sigma(&[4, 5, 6, 7, 1, 2, 3], &WeightTable::new(&spec, 7).unwrap()).unwrap(), BigInt::from(6));
    }

    #[test]
    fn lone_second_bottom() {
        // Leading singletons, then 5-blocks each followed by an even number of singletons.
        let spec = ThinnedSpec::from_union(&[1], Some(5), 1, 2).unwrap();
        let t = WeightTable::new(&spec, 15).unwrap();
        assert_eq!(t.values(), big(&[1, 1, 1, 1, 1, 2, 2, 3, 3, 4, 5, 6, 8, 9, 12, 14]).as_slice());
    }

    #[test]
    fn full_intervals() {
        for m in 1..=3usize {
            let members: Vec<u64> = (1..2 * m as u64).collect();
            let spec = ThinnedSpec::from_union(&members, None, 1, 2).unwrap();
            let t = WeightTable::new(&spec, 20).unwrap();
            for (l, w) in t.values().iter().enumerate() {
                assert_eq!(*w, BigInt::from((l % (2 * m) <= 1) as u8), "m={m} ℓ={l}");
            }
        }
    }

    #[test]
    fn grouped_weights_vanish_off_multiples() {
        let spec = ThinnedSpec::new(
            crate::spec::SizeSet::from_explicit([2, 6]).unwrap(),
            crate::spec::SizeSet::from_explicit([4]).unwrap(),
            2,
            2,
        )
        .unwrap();
        let t = WeightTable::new(&spec, 9).unwrap();
        assert!(t.values().iter().skip(1).step_by(2).all(Zero::is_zero));
    }

    #[test]
    fn sum_paths_agree() {
        let spec = ThinnedSpec::plain(&[1, 3], &[2]).unwrap();
        let t = WeightTable::new(&spec, 7).unwrap();
        for n in 0..=7 {
            assert_eq!(
                weighted_perm_sum(n, &t, SumPath::BruteForce { max_n: 10 }).unwrap(),
                weighted_perm_sum(n, &t, SumPath::Compositions).unwrap()
            );
        }
        assert!(weighted_perm_sum(7, &t, SumPath::BruteForce { max_n: 6 }).is_err());
    }

    #[test]
    fn csv_header() {
        let spec = ThinnedSpec::plain(&[1, 3], &[]).unwrap();
        assert!(WeightTable::new(&spec, 3).unwrap().to_csv().starts_with("ℓ,w_ℓ\n0,1\n"));
    }

    #[test]
    fn declines_non_odd_ended() {
        let spec = ThinnedSpec::plain(&[1], &[2]).unwrap();
        assert!(WeightTable::new(&spec, 3).is_err());
    }
}
