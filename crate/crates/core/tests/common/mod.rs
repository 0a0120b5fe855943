//! Test-only oracles, independent of the library's own algorithms.
#![allow(dead_code)]

use num_bigint::BigInt;
use thinned::spec::{Progression, SizeSet, ThinnedSpec};

pub fn union(members: &[u64], r: u64) -> ThinnedSpec {
    ThinnedSpec::from_union(members, None, 1, r).unwrap()
}

pub fn grouped(a: &[u64], b: &[u64], group: u64) -> ThinnedSpec {
    ThinnedSpec::new(SizeSet::from_explicit(a.iter().copied()).unwrap(), SizeSet::from_explicit(b.iter().copied()).unwrap(), group, 2)
        .unwrap()
}

/// `A = {1}`, `B = {4, 6, 8, ...}`.
pub fn one_then_evens() -> ThinnedSpec {
    ThinnedSpec::new(
        SizeSet::from_explicit([1]).unwrap(),
        SizeSet::new(Vec::new(), vec![Progression { start: 4, step: 2 }]).unwrap(),
        1,
        2,
    )
    .unwrap()
}

/// Odd-ended specs with the group size in `A`.
pub fn odd_ended_corpus() -> Vec<ThinnedSpec> {
    vec![
        union(&[1, 3], 2),
        union(&[1, 2, 3], 2),
        union(&[1, 3, 4, 5], 2),
        union(&[1, 2, 3, 5], 2),
        union(&[1, 5, 6, 7], 2),
        union(&[1, 3, 4, 7], 3),
        grouped(&[2, 6], &[4], 2),
    ]
}

/// `c_0..=c_n` from `c_n = Σ_A C(n,k) c_{n-k} - Σ_B C(n,k) c_{n-k}` with
/// Pascal's triangle built here.
pub fn recurrence(spec: &ThinnedSpec, n: usize) -> Vec<BigInt> {
    let mut pascal: Vec<Vec<BigInt>> = vec![vec![BigInt::from(1)]];
    for i in 1..=n {
        let prev = &pascal[i - 1];
        let row = (0..=i)
            .map(|k| {
                let left = if k > 0 { prev[k - 1].clone() } else { BigInt::from(0) };
                let right = prev.get(k).cloned().unwrap_or_default();
                left + right
            })
            .collect();
        pascal.push(row);
    }
    let mut c = vec![BigInt::from(1)];
    for m in 1..=n {
        let mut v = BigInt::from(0);
        for k in 1..=m {
            let term = &pascal[m][k] * &c[m - k];
            if spec.a().contains(k as u64) {
                v += term;
            } else if spec.b_set().contains(k as u64) {
                v -= term;
            }
        }
        c.push(v);
    }
    c
}

/// Visits every permutation of `1..=n`.
pub fn for_each_perm(n: u32, mut f: impl FnMut(&[u32])) {
    fn rec(cur: &mut Vec<u32>, used: &mut [bool], f: &mut dyn FnMut(&[u32])) {
        if cur.len() == used.len() {
            f(cur);
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i as u32 + 1);
                rec(cur, used, f);
                cur.pop();
                used[i] = false;
            }
        }
    }
    rec(&mut Vec::new(), &mut vec![false; n as usize], &mut f);
}

/// Lengths of the maximal increasing runs.
pub fn runs(perm: &[u32]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut len = 0;
    for (i, &x) in perm.iter().enumerate() {
        if i > 0 && x < perm[i - 1] {
            out.push(len);
            len = 0;
        }
        len += 1;
    }
    if len > 0 {
        out.push(len);
    }
    out
}

pub fn count_perms(n: u32, allowed: impl Fn(usize) -> bool) -> BigInt {
    let mut count = 0u64;
    for_each_perm(n, |p| count += runs(p).iter().all(|&l| allowed(l)) as u64);
    BigInt::from(count)
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).map(BigInt::from).product()
}
