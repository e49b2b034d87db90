//! Combinatorial number system for k-subsets of `[n]`.
//!
//! Ranks are lexicographic: rank 0 is `{1, 2, ..., k}` and rank `C(n,k) - 1`
//! is `{n-k+1, ..., n}`. Exhaustive enumeration, chunked parallel
//! enumeration and uniform sampling all go through this one bijection, so a
//! sampled rank and an enumerated rank always denote the same set.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, RngCore};

use crate::error::{Error, Result};

/// Largest `n` for which unranking scans candidates linearly.
const LINEAR_SCAN_LIMIT: u64 = 1 << 16;

/// Exact binomial coefficient.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Binomial coefficient if it (and every intermediate product) fits in `u128`.
pub fn binomial_u128(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        // acc * (n - i) / (i + 1) is exact. With g = gcd(acc, i + 1) the
        // reduced denominator is coprime to acc / g, so it divides n - i.
        let num = n as u128 - i;
        let den = i + 1;
        let g = gcd(acc, den);
        let (a, d) = (acc / g, den / g);
        debug_assert_eq!(num % d, 0);
        acc = a.checked_mul(num / d)?;
    }
    Some(acc)
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// `C(n, k)` as a `u64`, failing with a budget error naming the exact count
/// when it exceeds `budget`.
pub fn checked_count(n: u64, k: u64, budget: u64, what: &str) -> Result<u64> {
    let total = binomial(n, k);
    match total.to_u64() {
        Some(t) if t <= budget => Ok(t),
        _ => Err(Error::Budget {
            what: format!("{what} (C({n},{k}))"),
            required: total.to_string(),
            budget,
        }),
    }
}

/// Lexicographic rank of a strictly increasing 1-based subset of `[n]`.
pub fn rank(n: u64, set: &[u64]) -> BigUint {
    let k = set.len() as u64;
    let mut acc = binomial(n, k) - BigUint::one();
    for (i, &c) in set.iter().enumerate() {
        acc -= binomial(n - c, k - i as u64);
    }
    acc
}

/// Inverse of [`rank`]: the 1-based k-subset of `[n]` with the given rank.
pub fn unrank(n: u64, k: usize, rank: &BigUint) -> Result<Vec<u64>> {
    let total = binomial(n, k as u64);
    if *rank >= total {
        return Err(Error::invalid(format!(
            "rank {rank} out of range for C({n},{k}) = {total}"
        )));
    }
    if n <= LINEAR_SCAN_LIMIT {
        if let Some(r) = rank.to_u128() {
            if let Some(v) = unrank_linear(n, k, r) {
                return Ok(v);
            }
        }
    }
    Ok(unrank_bisect(n, k, rank))
}

/// Linear-scan unranking in `u128`; `None` on intermediate overflow.
fn unrank_linear(n: u64, k: usize, mut rank: u128) -> Option<Vec<u64>> {
    let mut out = Vec::with_capacity(k);
    let mut e = 1u64;
    for i in 0..k {
        let r = (k - i - 1) as u64;
        // count = number of completions when position i holds e = C(n - e, r)
        let mut count = binomial_u128(n - e, r)?;
        loop {
            if rank < count {
                out.push(e);
                e += 1;
                break;
            }
            rank -= count;
            // C(n-e-1, r) = C(n-e, r) * (n-e-r) / (n-e)
            let top = (n - e) as u128;
            if top == 0 {
                return None;
            }
            count = count.checked_mul(top - r as u128)? / top;
            e += 1;
        }
    }
    Some(out)
}

/// Unranking by bisection over candidate elements; works for any `n`.
fn unrank_bisect(n: u64, k: usize, rank: &BigUint) -> Vec<u64> {
    let mut out = Vec::with_capacity(k);
    let mut remaining = rank.clone();
    let mut prev = 0u64;
    for i in 0..k {
        let r = (k - i) as u64;
        let all = binomial(n - prev, r);
        // smallest e in (prev, n] with all - C(n-e, r) > remaining
        let (mut lo, mut hi) = (prev + 1, n - r + 1);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if &all - binomial(n - mid, r) > remaining {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        let e = lo;
        remaining -= &all - binomial(n - (e - 1), r);
        out.push(e);
        prev = e;
    }
    out
}

/// Advance a strictly increasing 0-based index tuple over `0..n` to its
/// lexicographic successor. Returns `false` when `idx` was the last tuple.
pub fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Visit `count` consecutive k-subsets of `0..n` (0-based indices) starting
/// at lexicographic rank `start`.
pub fn for_each_in_rank_range<F>(n: usize, k: usize, start: u64, count: u64, mut f: F) -> Result<()>
where
    F: FnMut(&[usize]) -> Result<()>,
{
    if count == 0 {
        return Ok(());
    }
    let mut idx: Vec<usize> = unrank(n as u64, k, &BigUint::from(start))?
        .into_iter()
        .map(|e| e as usize - 1)
        .collect();
    for step in 0..count {
        f(&idx)?;
        if step + 1 < count && !next_combination(&mut idx, n) {
            return Err(Error::invalid("rank range runs past the last subset"));
        }
    }
    Ok(())
}

/// Uniform sampler of k-subsets of `[n]` via uniform ranks.
#[derive(Debug, Clone)]
pub struct SubsetSampler {
    n: u64,
    k: usize,
    total: Total,
}

#[derive(Debug, Clone)]
enum Total {
    Small(u128),
    Big(BigUint),
}

impl SubsetSampler {
    pub fn new(n: u64, k: usize) -> Result<Self> {
        if k == 0 || k as u64 > n {
            return Err(Error::invalid(format!(
                "cannot sample {k}-subsets of [{n}]"
            )));
        }
        let big = binomial(n, k as u64);
        let total = match big.to_u128() {
            Some(t) if n <= LINEAR_SCAN_LIMIT => Total::Small(t),
            _ => Total::Big(big),
        };
        Ok(Self { n, k, total })
    }

    /// A uniformly random 1-based k-subset of `[n]`.
    pub fn sample<R: RngCore>(&self, rng: &mut R) -> Vec<u64> {
        match &self.total {
            Total::Small(t) => {
                let r = rng.gen_range(0..*t);
                unrank_linear(self.n, self.k, r)
                    .unwrap_or_else(|| unrank_bisect(self.n, self.k, &BigUint::from(r)))
            }
            Total::Big(t) => {
                let r = uniform_below(rng, t);
                unrank_bisect(self.n, self.k, &r)
            }
        }
    }
}

/// Rejection sampling of a uniform integer in `[0, bound)`.
fn uniform_below<R: RngCore>(rng: &mut R, bound: &BigUint) -> BigUint {
    let bits = bound.bits();
    let nbytes = bits.div_ceil(8) as usize;
    let excess = (nbytes as u64 * 8 - bits) as u32;
    let mut buf = vec![0u8; nbytes];
    loop {
        rng.fill_bytes(&mut buf);
        // big-endian; clear the excess high bits
        buf[0] &= 0xffu8.checked_shr(excess).unwrap_or(0);
        let v = BigUint::from_bytes_be(&buf);
        if &v < bound {
            return v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn all_subsets(n: u64, k: usize) -> Vec<Vec<u64>> {
        // brute force in lexicographic order via bitmasks
        let mut out: Vec<Vec<u64>> = (0u32..1 << n)
            .filter(|m| m.count_ones() as usize == k)
            .map(|m| (0..n).filter(|i| m >> i & 1 == 1).map(|i| i + 1).collect())
            .collect();
        out.sort();
        out
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(16, 6), BigUint::from(8008u32));
        assert_eq!(binomial(28, 24), BigUint::from(20475u32));
        assert_eq!(binomial(5, 7), BigUint::zero());
        assert_eq!(binomial_u128(60, 50), Some(75394027566));
        assert_eq!(
            binomial_u128(256, 7).unwrap(),
            binomial(256, 7).to_u128().unwrap()
        );
        assert_eq!(binomial_u128(200, 100), None);
    }

    #[test]
    fn rank_unrank_match_enumeration() {
        for n in 1..=9u64 {
            for k in 1..=n as usize {
                for (r, set) in all_subsets(n, k).iter().enumerate() {
                    assert_eq!(rank(n, set), BigUint::from(r));
                    assert_eq!(&unrank(n, k, &BigUint::from(r)).unwrap(), set);
                    assert_eq!(&unrank_bisect(n, k, &BigUint::from(r)), set);
                }
            }
        }
    }

    #[test]
    fn next_combination_walks_lexicographically() {
        let mut idx = vec![0, 1, 2];
        let mut seen = vec![idx.clone()];
        while next_combination(&mut idx, 6) {
            seen.push(idx.clone());
        }
        assert_eq!(seen.len(), 20);
        let expect: Vec<Vec<usize>> = all_subsets(6, 3)
            .into_iter()
            .map(|s| s.into_iter().map(|e| e as usize - 1).collect())
            .collect();
        assert_eq!(seen, expect);
    }

    #[test]
    fn huge_universe_unrank() {
        let n = u64::MAX / 2;
        let last = binomial(n, 3) - BigUint::one();
        assert_eq!(unrank(n, 3, &last).unwrap(), vec![n - 2, n - 1, n]);
        assert_eq!(unrank(n, 3, &BigUint::zero()).unwrap(), vec![1, 2, 3]);
        let mid = BigUint::from(123_456_789u64);
        let s = unrank(n, 3, &mid).unwrap();
        assert_eq!(rank(n, &s), mid);
    }

    #[test]
    fn budget_error_names_count() {
        let err = checked_count(16, 6, 1000, "edges").unwrap_err();
        match err {
            Error::Budget { required, .. } => assert_eq!(required, "8008"),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn sampler_is_roughly_uniform() {
        let s = SubsetSampler::new(6, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut counts = [0usize; 15];
        for _ in 0..30_000 {
            let set = s.sample(&mut rng);
            counts[rank(6, &set).to_usize().unwrap()] += 1;
        }
        for c in counts {
            assert!((1700..2300).contains(&c), "{counts:?}");
        }
    }

    proptest::proptest! {
        #[test]
        fn rank_roundtrip(n in 1u64..40, seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let k = rng.gen_range(1..=n as usize);
            let set = SubsetSampler::new(n, k).unwrap().sample(&mut rng);
            proptest::prop_assert!(set.windows(2).all(|w| w[0] < w[1]));
            let r = rank(n, &set);
            proptest::prop_assert_eq!(unrank(n, k, &r).unwrap(), set);
        }
    }
}
