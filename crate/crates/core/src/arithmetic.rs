//! Per-integer arithmetic: smallest-prime-factor tables, factorizations,
//! Euler's φ, the multiplicative function ψ with
//! ψ(p^a) = (p^a − 1)(p^(a−1) − 1)⋯(p − 1), and the four-way classification
//! of an order n into cyclic, strictly abelian, strictly nilpotent and
//! not-nilpotent numbers.
//!
//! The group-theoretic criteria used throughout:
//!
//! * n is cyclic iff gcd(n, φ(n)) = 1;
//! * n is abelian iff n is cubefree and gcd(n, ψ(n)) = 1;
//! * n is nilpotent iff gcd(n, ψ(n)) = 1.
//!
//! ψ(n) is never formed in the classification path. Both gcd conditions are
//! decided pairwise over the prime factors: a prime q | n divides ψ(n) iff
//! q | p^i − 1 for some other prime p | n and some 1 ≤ i ≤ v_p(n).

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};

/// Default memory budget for [`build_spf`], in bytes.
pub const DEFAULT_SPF_BUDGET: usize = 1 << 30;

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin for all 64-bit inputs.
///
/// The first twelve primes as witnesses are sufficient below 3.3·10^24.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest-prime-factor table for 2..=limit.
#[derive(Clone, Debug)]
pub struct SpfTable {
    limit: u64,
    spf: Vec<u32>,
}

impl SpfTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Smallest prime factor of `n`, for 2 ≤ n ≤ limit.
    pub fn smallest_factor(&self, n: u64) -> Option<u64> {
        if n < 2 || n > self.limit {
            return None;
        }
        Some(self.spf[n as usize] as u64)
    }
}

/// Builds the smallest-prime-factor table with the default memory budget.
pub fn build_spf(limit: u64) -> Result<SpfTable> {
    build_spf_with_budget(limit, DEFAULT_SPF_BUDGET)
}

pub fn build_spf_with_budget(limit: u64, budget_bytes: usize) -> Result<SpfTable> {
    if limit < 2 {
        return Err(Error::Domain(format!("spf limit must be at least 2, got {limit}")));
    }
    let bytes = (limit as u128 + 1) * std::mem::size_of::<u32>() as u128;
    if limit > u32::MAX as u64 || bytes > budget_bytes as u128 {
        return Err(Error::Resource(format!(
            "spf table up to {limit} needs {bytes} bytes, budget is {budget_bytes}"
        )));
    }
    let len = limit as usize + 1;
    let mut spf = vec![0u32; len];
    for i in 2..len {
        if spf[i] == 0 {
            spf[i] = i as u32;
            let p = i as u64;
            let mut m = p * p;
            while m <= limit {
                if spf[m as usize] == 0 {
                    spf[m as usize] = i as u32;
                }
                m += p;
            }
        }
    }
    Ok(SpfTable { limit, spf })
}

/// An integer n ≥ 1 together with its prime-power decomposition, primes in
/// strictly increasing order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Factorization {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    /// The factorization of 1.
    pub fn one() -> Self {
        Factorization { n: 1, factors: Vec::new() }
    }

    /// Validates and wraps a list of `(prime, exponent)` pairs.
    pub fn new(factors: Vec<(u64, u32)>) -> Result<Self> {
        let mut n: u64 = 1;
        let mut prev = 0u64;
        for &(p, a) in &factors {
            if p <= prev {
                return Err(Error::Domain("primes must be strictly increasing".into()));
            }
            if a == 0 {
                return Err(Error::Domain(format!("zero exponent for prime {p}")));
            }
            if !is_prime(p) {
                return Err(Error::Domain(format!("{p} is not prime")));
            }
            let pa = p
                .checked_pow(a)
                .ok_or_else(|| Error::Domain(format!("{p}^{a} overflows 64 bits")))?;
            n = n
                .checked_mul(pa)
                .ok_or_else(|| Error::Domain("product overflows 64 bits".into()))?;
            prev = p;
        }
        Ok(Factorization { n, factors })
    }

    // Callers guarantee the invariants.
    pub(crate) fn from_parts_unchecked(n: u64, factors: Vec<(u64, u32)>) -> Self {
        debug_assert_eq!(
            factors.iter().fold(1u64, |acc, &(p, a)| acc * p.pow(a)),
            n
        );
        Factorization { n, factors }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn max_exponent(&self) -> u32 {
        self.factors.iter().map(|&(_, a)| a).max().unwrap_or(0)
    }

    pub fn is_squarefree(&self) -> bool {
        self.max_exponent() <= 1
    }

    pub fn is_cubefree(&self) -> bool {
        self.max_exponent() <= 2
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        for (i, &(p, a)) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            if a == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{a}")?;
            }
        }
        Ok(())
    }
}

/// Factorizes `n` using a precomputed table.
pub fn factorize(n: u64, table: &SpfTable) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::Domain("cannot factorize 0".into()));
    }
    if n > table.limit {
        return Err(Error::Domain(format!(
            "{n} exceeds the spf table limit {}",
            table.limit
        )));
    }
    let mut factors: Vec<(u64, u32)> = Vec::new();
    let mut m = n;
    while m > 1 {
        let p = table.spf[m as usize] as u64;
        let mut a = 0;
        while m.is_multiple_of(p) {
            m /= p;
            a += 1;
        }
        factors.push((p, a));
    }
    Ok(Factorization::from_parts_unchecked(n, factors))
}

/// Factorizes an arbitrary 64-bit integer by trial division over small
/// primes followed by Pollard–Brent rho on the remaining cofactor.
pub fn factorize_u64(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::Domain("cannot factorize 0".into()));
    }
    let mut primes: Vec<u64> = Vec::new();
    let mut m = n;
    let mut d = 2u64;
    while d < 1000 && d * d <= m {
        while m.is_multiple_of(d) {
            primes.push(d);
            m /= d;
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if m > 1 {
        split_into_primes(m, &mut primes);
    }
    primes.sort_unstable();
    let mut factors: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match factors.last_mut() {
            Some((q, a)) if *q == p => *a += 1,
            _ => factors.push((p, 1)),
        }
    }
    Ok(Factorization::from_parts_unchecked(n, factors))
}

fn split_into_primes(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let root = (n as f64).sqrt() as u64;
    for r in root.saturating_sub(1)..=root + 1 {
        if r.checked_mul(r) == Some(n) {
            split_into_primes(r, out);
            split_into_primes(r, out);
            return;
        }
    }
    let mut c = 1u64;
    let d = loop {
        if let Some(d) = brent_rho(n, c) {
            break d;
        }
        c += 1;
    };
    split_into_primes(d, out);
    split_into_primes(n / d, out);
}

/// One Pollard–Brent attempt with polynomial x² + c. Returns a nontrivial
/// divisor of the odd composite `n`, or `None` if this `c` cycles.
fn brent_rho(n: u64, c: u64) -> Option<u64> {
    use num_integer::Integer;
    const BATCH: u64 = 128;
    let f = |x: u64| (mul_mod(x, x, n) + c) % n;
    let mut y = 2u64;
    let mut r = 1u64;
    let mut q = 1u64;
    let mut g = 1u64;
    let mut x = y;
    let mut ys = y;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..BATCH.min(r - k) {
                y = f(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            g = q.gcd(&n);
            k += BATCH;
        }
        r *= 2;
    }
    if g == n {
        loop {
            ys = f(ys);
            g = x.abs_diff(ys).gcd(&n);
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

/// Euler's totient from a factorization.
pub fn euler_phi(f: &Factorization) -> u64 {
    f.factors
        .iter()
        .map(|&(p, a)| p.pow(a - 1) * (p - 1))
        .product()
}

/// ψ(n) as an unbounded integer. Intended for oracles and display only.
pub fn psi_exact(f: &Factorization) -> BigUint {
    let mut acc = BigUint::one();
    for &(p, a) in &f.factors {
        let p = BigUint::from(p);
        let mut pi = p.clone();
        for _ in 0..a {
            acc *= &pi - 1u32;
            pi *= &p;
        }
    }
    acc
}

/// Returns false iff some prime q | n divides p^i − 1 for another prime
/// p | n and 1 ≤ i ≤ v_p(n); with `exponent_cap = Some(1)` only i = 1 is
/// considered.
fn pairwise_coprime(factors: &[(u64, u32)], exponent_cap: Option<u32>) -> bool {
    for &(p, a) in factors {
        let top = exponent_cap.map_or(a, |cap| a.min(cap));
        for &(q, _) in factors {
            if q == p {
                continue;
            }
            let r = p % q;
            let mut pi = r;
            for _ in 0..top {
                if pi == 1 {
                    return false;
                }
                pi = mul_mod(pi, r, q);
            }
        }
    }
    true
}

/// gcd(n, ψ(n)) = 1, decided without forming ψ(n).
pub fn psi_coprime(f: &Factorization) -> bool {
    pairwise_coprime(&f.factors, None)
}

/// gcd(n, φ(n)) = 1 in its pairwise form: n squarefree and q ∤ p − 1 for
/// all distinct primes p, q | n.
pub fn is_cyclic(f: &Factorization) -> bool {
    f.is_squarefree() && pairwise_coprime(&f.factors, Some(1))
}

/// Four-way classification of an order n.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NumberClass {
    Cyclic,
    StrictlyAbelian,
    StrictlyNilpotent,
    NotNilpotent,
}

impl NumberClass {
    pub const ALL: [NumberClass; 4] = [
        NumberClass::Cyclic,
        NumberClass::StrictlyAbelian,
        NumberClass::StrictlyNilpotent,
        NumberClass::NotNilpotent,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            NumberClass::Cyclic => "cyclic",
            NumberClass::StrictlyAbelian => "strictly_abelian",
            NumberClass::StrictlyNilpotent => "strictly_nilpotent",
            NumberClass::NotNilpotent => "not_nilpotent",
        }
    }

    /// Class of an n already known to satisfy gcd(n, ψ(n)) = 1, from the
    /// largest exponent in its factorization.
    #[inline]
    pub(crate) fn of_nilpotent(max_exponent: u32) -> NumberClass {
        match max_exponent {
            0 | 1 => NumberClass::Cyclic,
            2 => NumberClass::StrictlyAbelian,
            _ => NumberClass::StrictlyNilpotent,
        }
    }
}

impl fmt::Display for NumberClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NumberClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        NumberClass::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::Domain(format!("unknown class '{s}'")))
    }
}

pub fn classify(f: &Factorization) -> NumberClass {
    if is_cyclic(f) {
        NumberClass::Cyclic
    } else if !psi_coprime(f) {
        NumberClass::NotNilpotent
    } else if f.is_cubefree() {
        NumberClass::StrictlyAbelian
    } else {
        NumberClass::StrictlyNilpotent
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_integer::Integer;

    fn trial_division_spf(n: u64) -> u64 {
        (2..=n).find(|d| n.is_multiple_of(*d)).unwrap()
    }

    #[test]
    fn spf_examples() {
        let t = build_spf(120).unwrap();
        assert_eq!(t.smallest_factor(12), Some(2));
        assert_eq!(t.smallest_factor(91), Some(7));
        assert_eq!(t.smallest_factor(97), Some(97));
        assert_eq!(t.smallest_factor(1), None);
        assert_eq!(t.smallest_factor(121), None);
    }

    #[test]
    fn spf_matches_trial_division() {
        let t = build_spf(5000).unwrap();
        for n in 2..=5000 {
            let p = t.smallest_factor(n).unwrap();
            assert_eq!(p, trial_division_spf(n), "n = {n}");
            assert_eq!(p == n, is_prime(n));
        }
    }

    #[test]
    fn spf_budget_and_domain() {
        assert!(matches!(build_spf(1), Err(Error::Domain(_))));
        assert!(matches!(
            build_spf_with_budget(1_000_000, 1024),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn factorize_examples() {
        let t = build_spf(10_000).unwrap();
        assert!(factorize(1, &t).unwrap().factors().is_empty());
        assert_eq!(factorize(12, &t).unwrap().factors(), &[(2, 2), (3, 1)]);
        assert_eq!(factorize(9797, &t).unwrap().factors(), &[(97, 1), (101, 1)]);
        assert!(matches!(factorize(0, &t), Err(Error::Domain(_))));
        assert!(matches!(factorize(10_001, &t), Err(Error::Domain(_))));
    }

    #[test]
    fn factorize_u64_large() {
        let n = 4_611_686_014_132_420_609u64; // (2^31 - 1)^2
        assert_eq!(factorize_u64(n).unwrap().factors(), &[(2_147_483_647, 2)]);
        let n = 999_999_999_989u64 * 7;
        assert_eq!(factorize_u64(n).unwrap().factors(), &[(7, 1), (999_999_999_989, 1)]);
        let n = 1_000_003u64 * 1_000_033 * 1_000_037;
        assert_eq!(
            factorize_u64(n).unwrap().factors(),
            &[(1_000_003, 1), (1_000_033, 1), (1_000_037, 1)]
        );
        assert_eq!(factorize_u64(1 << 62).unwrap().factors(), &[(2, 62)]);
    }

    #[test]
    fn miller_rabin_known_values() {
        assert!(is_prime(2));
        assert!(!is_prime(1));
        assert!(is_prime(18_446_744_073_709_551_557)); // largest 64-bit prime
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to 2, 3, 5, 7
        assert!(!is_prime(341_550_071_728_321));
    }

    #[test]
    fn factorization_validation() {
        assert!(Factorization::new(vec![(2, 1), (4, 1)]).is_err());
        assert!(Factorization::new(vec![(3, 1), (2, 1)]).is_err());
        assert!(Factorization::new(vec![(3, 0)]).is_err());
        assert!(Factorization::new(vec![(2, 64)]).is_err());
        assert_eq!(Factorization::new(vec![(2, 3), (5, 1)]).unwrap().n(), 40);
        assert_eq!(Factorization::new(vec![]).unwrap(), Factorization::one());
    }

    #[test]
    fn phi_and_psi_examples() {
        let t = build_spf(100).unwrap();
        let f = |n| factorize(n, &t).unwrap();
        assert_eq!(euler_phi(&f(1)), 1);
        assert_eq!(euler_phi(&f(97)), 96);
        assert_eq!(euler_phi(&f(12)), 4);
        assert_eq!(psi_exact(&f(1)), BigUint::from(1u32));
        assert_eq!(psi_exact(&f(4)), BigUint::from(3u32));
        assert_eq!(psi_exact(&f(12)), BigUint::from(6u32));
        assert_eq!(psi_exact(&f(8)), BigUint::from(21u32));
        assert_eq!(psi_exact(&f(45)), BigUint::from(64u32));
        assert_eq!(psi_exact(&f(89)), BigUint::from(euler_phi(&f(89))));
    }

    #[test]
    fn psi_coprime_examples() {
        let t = build_spf(100).unwrap();
        let f = |n| factorize(n, &t).unwrap();
        assert!(psi_coprime(&f(8)));
        assert!(!psi_coprime(&f(6)));
        assert!(psi_coprime(&f(45)));
    }

    #[test]
    fn classify_examples() {
        let t = build_spf(100).unwrap();
        let c = |n| classify(&factorize(n, &t).unwrap());
        assert_eq!(c(1), NumberClass::Cyclic);
        assert_eq!(c(4), NumberClass::StrictlyAbelian);
        assert_eq!(c(8), NumberClass::StrictlyNilpotent);
        assert_eq!(c(15), NumberClass::Cyclic);
        assert_eq!(c(6), NumberClass::NotNilpotent);
        assert_eq!(c(45), NumberClass::StrictlyAbelian);
        assert_eq!(c(99), NumberClass::StrictlyAbelian);
    }

    /// Classification straight from the gcd definitions with exact ψ and φ.
    fn naive_class(f: &Factorization) -> NumberClass {
        let n = BigUint::from(f.n());
        let phi = BigUint::from(euler_phi(f));
        let psi = psi_exact(f);
        if n.gcd(&phi).is_one() {
            NumberClass::Cyclic
        } else if !n.gcd(&psi).is_one() {
            NumberClass::NotNilpotent
        } else if f.is_cubefree() {
            NumberClass::StrictlyAbelian
        } else {
            NumberClass::StrictlyNilpotent
        }
    }

    #[test]
    fn classify_matches_naive_oracle() {
        let t = build_spf(100_000).unwrap();
        for n in 1..=100_000 {
            let f = factorize(n, &t).unwrap();
            let class = classify(&f);
            assert_eq!(class, naive_class(&f), "n = {n}");
            let psi_gcd_one = BigUint::from(n).gcd(&psi_exact(&f)).is_one();
            assert_eq!(psi_coprime(&f), psi_gcd_one, "n = {n}");
            // Cyclic ⇒ abelian test ⇒ nilpotent test.
            if class == NumberClass::Cyclic {
                assert!(f.is_squarefree() && psi_coprime(&f));
            }
            if class == NumberClass::NotNilpotent {
                assert!(!psi_coprime(&f));
            }
        }
    }

    #[test]
    fn class_names_round_trip() {
        for c in NumberClass::ALL {
            assert_eq!(c.as_str().parse::<NumberClass>().unwrap(), c);
        }
        assert!("abelian".parse::<NumberClass>().is_err());
    }

    proptest::proptest! {
        #[test]
        fn prime_powers_classify_by_exponent(idx in 0usize..25, a in 1u32..6) {
            const PRIMES: [u64; 25] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41,
                43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97];
            let f = Factorization::new(vec![(PRIMES[idx], a)]).unwrap();
            let expected = match a {
                1 => NumberClass::Cyclic,
                2 => NumberClass::StrictlyAbelian,
                _ => NumberClass::StrictlyNilpotent,
            };
            proptest::prop_assert_eq!(classify(&f), expected);
        }

        #[test]
        fn factorize_u64_reconstructs(n in 1u64..u64::MAX) {
            let f = factorize_u64(n).unwrap();
            let mut prod = 1u64;
            for &(p, a) in f.factors() {
                proptest::prop_assert!(is_prime(p));
                prod *= p.pow(a);
            }
            proptest::prop_assert_eq!(prod, n);
        }
    }
}
