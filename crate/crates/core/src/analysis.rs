//! Negativity and non-negativity analyses: the closed-form necessary
//! condition, scans of the reduced family, the closure property, finite
//! certificates and the identity-permutation tally.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::Mutex;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::partitions::{enumerate, EnumBudget};
use crate::series::{certificate_fg, egf_reciprocal_coeffs, reciprocal, CoeffSeq};
use crate::spec::{Progression, SizeSet, ThinnedSpec};

/// Largest `m` covered by the extended scan.
pub const EXTENDED_M_MAX: u32 = 250;
/// Coefficient horizon of the extended scan.
pub const EXTENDED_N_MAX: usize = 2500;

fn even_tail(from: u64) -> Progression {
    Progression { start: from, step: 2 }
}

/// `A∪B = [2m]`, optionally with every even number from `2m + 2` on.
pub fn full_interval_spec(m: u32, with_tail: bool) -> Result<ThinnedSpec> {
    if m == 0 {
        return Err(Error::Precondition("m must be at least 1".into()));
    }
    let top = 2 * m as u64;
    let a = SizeSet::from_explicit((1..=top).filter(|k| k % 2 == 1))?;
    let evens: Vec<u64> = (1..=top).filter(|k| k % 2 == 0).collect();
    let tails = if with_tail { vec![even_tail(top + 2)] } else { Vec::new() };
    ThinnedSpec::new(a, SizeSet::new(evens, tails)?, 1, 2)
}

/// `A∪B = [2m - 1] ∪ {2m + 2, 2m + 4, ...}`.
pub fn reduced_family_spec(m: u32) -> Result<ThinnedSpec> {
    if m == 0 {
        return Err(Error::Precondition("m must be at least 1".into()));
    }
    let top = 2 * m as u64 - 1;
    let a = SizeSet::from_explicit((1..=top).filter(|k| k % 2 == 1))?;
    let evens: Vec<u64> = (1..=top).filter(|k| k % 2 == 0).collect();
    ThinnedSpec::new(a, SizeSet::new(evens, vec![even_tail(top + 3)])?, 1, 2)
}

/// Computes `c_{2m+2}` for `[2m]` (with or without the even tail) and
/// checks it against `-2(2m+1)`, one less when the tail is present.
pub fn necessary_check(m: u32, with_tail: bool) -> Result<BigInt> {
    let spec = full_interval_spec(m, with_tail)?;
    let n = 2 * m as usize + 2;
    let computed = egf_reciprocal_coeffs(&spec, n).coeff(n);
    let closed = BigInt::from(-2 * (2 * m as i64 + 1) - with_tail as i64);
    if computed != closed {
        return Err(Error::Verification(format!("m={m}: c_{n} = {computed}, closed form gives {closed}")));
    }
    Ok(computed)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    /// Family parameter; absent for scans of arbitrary specs.
    pub m: Option<u32>,
    pub n_max: usize,
    /// First `(n, c_n)` with `c_n < 0`, value in decimal.
    pub first_negative: Option<(usize, String)>,
    pub negative_count: usize,
    pub runtime_secs: f64,
    /// SHA-256 of the newline-joined decimal coefficients `c_0..c_{n_max}`.
    pub prefix_sha256: String,
}

impl ScanReport {
    pub fn all_nonnegative(&self) -> bool {
        self.first_negative.is_none()
    }

    pub fn csv_header() -> &'static str {
        "m,n_max,first_negative_n,first_negative_value"
    }

    pub fn csv_row(&self) -> String {
        let m = self.m.map(|m| m.to_string()).unwrap_or_default();
        let (n, v) = match &self.first_negative {
            Some((n, v)) => (n.to_string(), v.clone()),
            None => (String::new(), String::new()),
        };
        format!("{m},{},{n},{v}", self.n_max)
    }
}

/// Hex SHA-256 of the coefficients joined by newlines.
pub fn prefix_hash(values: &[BigInt]) -> String {
    let mut hasher = Sha256::new();
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            hasher.update(b"\n");
        }
        hasher.update(v.to_string().as_bytes());
    }
    hex::encode(hasher.finalize())
}

/// Scans `c_0..c_{n_max}` of any spec for negative entries.
pub fn scan_spec(spec: &ThinnedSpec, n_max: usize) -> ScanReport {
    let start = Instant::now();
    let c = egf_reciprocal_coeffs(spec, n_max);
    let negatives: Vec<(usize, &BigInt)> = c.values().iter().enumerate().filter(|(_, v)| v.is_negative()).collect();
    ScanReport {
        m: None,
        n_max,
        first_negative: negatives.first().map(|(n, v)| (*n, v.to_string())),
        negative_count: negatives.len(),
        runtime_secs: start.elapsed().as_secs_f64(),
        prefix_sha256: prefix_hash(c.values()),
    }
}

/// Scan of the reduced family member for `m`.
pub fn conjecture_scan(m: u32, n_max: usize) -> Result<ScanReport> {
    if n_max == 0 {
        return Err(Error::Precondition("n_max must be at least 1".into()));
    }
    let spec = reduced_family_spec(m)?;
    Ok(ScanReport { m: Some(m), ..scan_spec(&spec, n_max) })
}

/// Scans every `m` in `ms` on a pool of `workers` threads, one `m` per task.
/// With a checkpoint path, completed entries with the same `n_max` are
/// reused and each newly finished `m` is appended as one JSON line.
pub fn scan_range(ms: std::ops::RangeInclusive<u32>, n_max: usize, workers: usize, checkpoint: Option<&Path>) -> Result<Vec<ScanReport>> {
    let done = match checkpoint {
        Some(path) if path.exists() => load_checkpoint(path)?,
        _ => BTreeMap::new(),
    };
    let writer = match checkpoint {
        Some(path) => Some(Mutex::new(OpenOptions::new().create(true).append(true).open(path)?)),
        None => None,
    };
    let todo: Vec<u32> = ms.clone().filter(|m| done.get(m).is_none_or(|r| r.n_max != n_max)).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Precondition(format!("cannot start worker pool: {e}")))?;
    let fresh: Vec<ScanReport> = pool.install(|| {
        todo.par_iter()
            .map(|&m| {
                let report = conjecture_scan(m, n_max)?;
                if let Some(w) = &writer {
                    let line = serde_json::to_string(&report)?;
                    let mut file = w.lock().expect("checkpoint writer poisoned");
                    writeln!(file, "{line}")?;
                    file.flush()?;
                }
                Ok(report)
            })
            .collect::<Result<_>>()
    })?;
    let mut by_m: BTreeMap<u32, ScanReport> = done.into_iter().filter(|(m, r)| ms.contains(m) && r.n_max == n_max).collect();
    for r in fresh {
        by_m.insert(r.m.expect("family scans carry m"), r);
    }
    Ok(by_m.into_values().collect())
}

/// Reads a checkpoint file; later lines win.
pub fn load_checkpoint(path: &Path) -> Result<BTreeMap<u32, ScanReport>> {
    let mut out = BTreeMap::new();
    for line in BufReader::new(File::open(path)?).lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let report: ScanReport = serde_json::from_str(&line)?;
        if let Some(m) = report.m {
            out.insert(m, report);
        }
    }
    Ok(out)
}

/// Checks that `1/(f - g)` has non-negative coefficients through degree
/// `n`, given `f(0) = 1`, `g(0) = 0`, `g >= 0` and `1/f >= 0` there.
pub fn closure_check(f: &CoeffSeq, g: &CoeffSeq, n: usize) -> Result<bool> {
    if f.kind() != g.kind() {
        return Err(Error::InvalidSeries("f and g must use the same normalization".into()));
    }
    if !f.coeff(0).is_one() {
        return Err(Error::Precondition("f(0) must be 1".into()));
    }
    if !g.coeff(0).is_zero() {
        return Err(Error::Precondition("g(0) must be 0".into()));
    }
    if let Some((k, v)) = g.values().iter().enumerate().take(n + 1).find(|(_, v)| v.is_negative()) {
        return Err(Error::Precondition(format!("g has the negative coefficient {v} at degree {k}")));
    }
    if let Some((k, v)) = reciprocal(f, n)?.first_negative() {
        return Err(Error::Precondition(format!("1/f has the negative coefficient {v} at degree {k}")));
    }
    let diff = CoeffSeq::new(f.kind(), (0..=n).map(|k| f.coeff(k) - g.coeff(k)).collect());
    Ok(reciprocal(&diff, n)?.first_negative().is_none())
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificateReport {
    pub m: u32,
    pub a: String,
    pub n: usize,
    /// Every degree `1..=n` coefficient of `1 - f g` is non-negative.
    pub passed: bool,
    /// First degree with `[x^d] f g > 0`, and that coefficient.
    pub first_failure: Option<(usize, String)>,
    /// `[x^d] f g` for `d = 0..=min(n, 7)`.
    pub low_degree: Vec<String>,
}

/// Finite certificate: builds the companion series for `m` and `a` and
/// checks the sign of `f g` through degree `n`. Degrees past `n` are not
/// covered; they need an analytic tail bound.
pub fn certify(m: u32, a: &BigRational, n: usize) -> Result<CertificateReport> {
    let fg = certificate_fg(m, a, n)?;
    let first_failure = fg.iter().enumerate().skip(1).find(|(_, v)| v.is_positive()).map(|(d, v)| (d, v.to_string()));
    Ok(CertificateReport {
        m,
        a: a.to_string(),
        n,
        passed: first_failure.is_none(),
        first_failure,
        low_degree: fg.iter().take(8).map(BigRational::to_string).collect(),
    })
}

/// Signed count of the admissible partitions of `[n]` whose blocks read
/// left to right give `1 2 ... n`.
pub fn identity_signed_tally(n: u32, spec: &ThinnedSpec) -> Result<BigInt> {
    let mut tally = BigInt::zero();
    for p in enumerate(n, spec, EnumBudget::default())? {
        if p.underlying_permutation().iter().zip(1..).all(|(&x, i)| x == i) {
            if p.is_positive(spec) {
                tally += 1;
            } else {
                tally -= 1;
            }
        }
    }
    Ok(tally)
}

/// `A = {1}`, `B = {4, 6, 8, ...}`.
pub fn witness_spec() -> ThinnedSpec {
    ThinnedSpec::new(
        SizeSet::from_explicit([1]).expect("valid"),
        SizeSet::new(Vec::new(), vec![even_tail(4)]).expect("valid"),
        1,
        2,
    )
    .expect("valid spec")
}

/// Tally for the identity of `[5]` under [`witness_spec`]: any involution
/// that preserves underlying permutations would need it to be non-negative.
pub fn limitation_witness() -> Result<BigInt> {
    let tally = identity_signed_tally(5, &witness_spec())?;
    if tally != BigInt::from(-1) {
        return Err(Error::Verification(format!("identity tally is {tally}, expected -1")));
    }
    Ok(tally)
}

/// Random odd-ended spec with `1 ∈ A` (so `1/f >= 0`) paired with a random
/// non-negative `g` with `g(0) = 0`, both as e.g.f. coefficient lists.
#[derive(Clone, Debug)]
pub struct ClosureSample {
    pub spec: ThinnedSpec,
    pub f: CoeffSeq,
    pub g: CoeffSeq,
}

pub fn random_closure_sample<R: Rng>(rng: &mut R, n: usize) -> ClosureSample {
    let mut members = Vec::new();
    let mut lo = 1u64;
    while lo <= n as u64 {
        let hi = lo + 2 * rng.gen_range(0..3u64);
        members.extend(lo..=hi);
        lo = hi + 2 + 2 * rng.gen_range(0..4u64);
    }
    let spec = ThinnedSpec::from_union(&members, None, 1, 2).expect("odd-ended union");
    let f = crate::series::spec_series(&spec, n);
    let g = CoeffSeq::egf((0..=n).map(|k| if k == 0 || rng.gen_bool(0.6) { 0u32 } else { rng.gen_range(1..=5u32) }));
    ClosureSample { spec, f, g }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosureRun {
    pub seed: u64,
    pub samples: usize,
    pub n: usize,
    pub failures: Vec<String>,
}

/// Runs [`closure_check`] on `samples` pairs drawn from a ChaCha stream
/// seeded with `seed`.
pub fn closure_property_run(seed: u64, samples: usize, n: usize) -> Result<ClosureRun> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for i in 0..samples {
        let s = random_closure_sample(&mut rng, n);
        if !closure_check(&s.f, &s.g, n)? {
            failures.push(format!("sample {i}: {} with g = {:?}", s.spec, s.g.values().iter().map(BigInt::to_string).collect::<Vec<_>>()));
        }
    }
    Ok(ClosureRun { seed, samples, n, failures })
}
