//! Prime generation: a plain Eratosthenes sieve for small bounds and a
//! segmented sieve for streaming primes out of large intervals.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Largest prime bound the checks will sieve to unless configured otherwise.
pub const DEFAULT_SIEVE_CAP: u64 = 10_000_000_000;

const SEGMENT_LEN: u64 = 1 << 21;

/// All primes p ≤ `limit`.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let len = limit as usize + 1;
    let mut composite = vec![false; len];
    let mut out = Vec::new();
    for i in 2..len {
        if !composite[i] {
            out.push(i as u64);
            let mut m = i * i;
            while m < len {
                composite[m] = true;
                m += i;
            }
        }
    }
    out
}

/// ⌊√n⌋ for any 64-bit n.
pub fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).is_none_or(|sq| sq > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= n) {
        r += 1;
    }
    r
}

/// Primes up to ⌊√hi⌋, tagged with the bound they are complete to.
#[derive(Clone, Debug)]
pub struct BasePrimes {
    bound: u64,
    primes: Vec<u64>,
}

impl BasePrimes {
    /// Every prime ≤ ⌊√hi⌋.
    pub fn for_limit(hi: u64) -> Self {
        let bound = isqrt(hi);
        BasePrimes { bound, primes: primes_up_to(bound) }
    }

    /// Wraps a prime list that the caller asserts is complete up to `bound`.
    pub fn from_parts(bound: u64, primes: Vec<u64>) -> Self {
        BasePrimes { bound, primes }
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// True when these primes suffice to factor every n ≤ hi.
    pub fn covers(&self, hi: u64) -> bool {
        (self.bound as u128 + 1) * (self.bound as u128 + 1) > hi as u128
    }
}

/// Writes the primes in [lo, hi] into `out`, using base primes that cover hi.
fn sieve_block(lo: u64, hi: u64, base: &BasePrimes, marks: &mut Vec<bool>, out: &mut Vec<u64>) {
    out.clear();
    let len = (hi - lo + 1) as usize;
    marks.clear();
    marks.resize(len, true);
    for &p in base.primes() {
        let sq = p * p;
        if sq > hi {
            break;
        }
        let start = sq.max(lo.div_ceil(p) * p);
        let mut m = (start - lo) as usize;
        let step = p as usize;
        while m < len {
            marks[m] = false;
            m += step;
        }
    }
    for (i, &is_p) in marks.iter().enumerate() {
        let n = lo + i as u64;
        if is_p && n >= 2 {
            out.push(n);
        }
    }
}

fn check_cap(hi: u64, cap: u64) -> Result<()> {
    if hi > cap {
        return Err(Error::Resource(format!(
            "prime bound {hi} exceeds the configured sieve cap {cap}"
        )));
    }
    Ok(())
}

/// Calls `f` on every prime in [lo, hi], in increasing order.
pub fn for_each_prime(lo: u64, hi: u64, cap: u64, mut f: impl FnMut(u64)) -> Result<()> {
    check_cap(hi, cap)?;
    if hi < lo.max(2) {
        return Ok(());
    }
    let base = BasePrimes::for_limit(hi);
    let mut marks = Vec::new();
    let mut block = Vec::new();
    let mut start = lo.max(2);
    while start <= hi {
        let end = hi.min(start.saturating_add(SEGMENT_LEN - 1));
        sieve_block(start, end, &base, &mut marks, &mut block);
        block.iter().copied().for_each(&mut f);
        if end == u64::MAX {
            break;
        }
        start = end + 1;
    }
    Ok(())
}

/// Sieves [lo, hi] in fixed blocks on the rayon pool and maps each block's
/// primes through `f`. Results come back in block order, so folding them
/// sequentially is deterministic regardless of scheduling.
pub fn par_map_prime_blocks<T, F>(lo: u64, hi: u64, cap: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&[u64]) -> T + Sync,
{
    check_cap(hi, cap)?;
    let lo = lo.max(2);
    if hi < lo {
        return Ok(Vec::new());
    }
    let base = BasePrimes::for_limit(hi);
    let blocks: Vec<(u64, u64)> = {
        let mut v = Vec::new();
        let mut start = lo;
        loop {
            let end = hi.min(start.saturating_add(SEGMENT_LEN - 1));
            v.push((start, end));
            if end >= hi {
                break;
            }
            start = end + 1;
        }
        v
    };
    Ok(blocks
        .into_par_iter()
        .map_init(
            || (Vec::new(), Vec::new()),
            |(marks, primes), (a, b)| {
                sieve_block(a, b, &base, marks, primes);
                f(primes)
            },
        )
        .collect())
}

/// Compensated (Neumaier) summation; keeps long prime sums accurate to a
/// few ulps of the total.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: CompensatedSum) {
        self.add(other.sum);
        self.add(other.carry);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}
