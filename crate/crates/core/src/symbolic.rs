//! Exact constants over Q[γ, ζ(2), ζ(3), …].
//!
//! γ and the ζ(k) are independent formal generators; no relation between
//! them (such as ζ(4) = π⁴/90) is applied. π² only appears when printing,
//! where each ζ(2) is rendered as π²/6.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// A product γ^a · ζ(2)^e₂ · ζ(3)^e₃ ⋯.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ConstantMonomial {
    gamma: u32,
    // zeta[i] is the exponent of ζ(i + 2); no trailing zeros.
    zeta: Vec<u32>,
}

impl ConstantMonomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn gamma() -> Self {
        ConstantMonomial { gamma: 1, zeta: Vec::new() }
    }

    /// ζ(k) for k ≥ 2.
    pub fn zeta(k: u32) -> Self {
        assert!(k >= 2, "ζ(k) needs k ≥ 2");
        let mut zeta = vec![0; k as usize - 1];
        zeta[k as usize - 2] = 1;
        ConstantMonomial { gamma: 0, zeta }
    }

    pub fn gamma_exponent(&self) -> u32 {
        self.gamma
    }

    pub fn zeta_exponent(&self, k: u32) -> u32 {
        k.checked_sub(2)
            .and_then(|i| self.zeta.get(i as usize).copied())
            .unwrap_or(0)
    }

    /// Largest k with ζ(k) present, if any.
    pub fn max_zeta(&self) -> Option<u32> {
        (!self.zeta.is_empty()).then(|| self.zeta.len() as u32 + 1)
    }

    /// Non-zero (k, exponent) pairs for the ζ factors.
    pub fn zeta_factors(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.zeta
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| (i as u32 + 2, e))
    }

    pub fn is_one(&self) -> bool {
        self.gamma == 0 && self.zeta.is_empty()
    }

    /// Weight with γ counted as 1 and ζ(k) as k.
    pub fn weight(&self) -> u32 {
        self.gamma + self.zeta_factors().map(|(k, e)| k * e).sum::<u32>()
    }

    pub fn mul(&self, other: &ConstantMonomial) -> ConstantMonomial {
        let len = self.zeta.len().max(other.zeta.len());
        let zeta = (0..len)
            .map(|i| self.zeta.get(i).unwrap_or(&0) + other.zeta.get(i).unwrap_or(&0))
            .collect();
        ConstantMonomial { gamma: self.gamma + other.gamma, zeta }
    }
}

impl Ord for ConstantMonomial {
    /// Increasing weight; within a weight, higher powers of γ first, then
    /// higher powers of the smaller ζ values.
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight()
            .cmp(&other.weight())
            .then_with(|| other.gamma.cmp(&self.gamma))
            .then_with(|| other.zeta.cmp(&self.zeta))
    }
}

impl PartialOrd for ConstantMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Rational linear combination of monomials in γ and ζ(k).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SymbolicConstant {
    terms: BTreeMap<ConstantMonomial, BigRational>,
}

impl SymbolicConstant {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::rational(BigRational::one())
    }

    pub fn rational(r: BigRational) -> Self {
        Self::term(r, ConstantMonomial::one())
    }

    pub fn integer(v: i64) -> Self {
        Self::rational(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn fraction(num: i64, den: i64) -> Self {
        Self::rational(BigRational::new(num.into(), den.into()))
    }

    pub fn term(coeff: BigRational, monomial: ConstantMonomial) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(monomial, coeff);
        }
        SymbolicConstant { terms }
    }

    pub fn gamma() -> Self {
        Self::term(BigRational::one(), ConstantMonomial::gamma())
    }

    pub fn zeta(k: u32) -> Self {
        Self::term(BigRational::one(), ConstantMonomial::zeta(k))
    }

    /// π² as 6ζ(2).
    pub fn pi_squared() -> Self {
        Self::term(BigRational::from_integer(6.into()), ConstantMonomial::zeta(2))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ConstantMonomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &ConstantMonomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn max_zeta(&self) -> Option<u32> {
        self.terms.keys().filter_map(|m| m.max_zeta()).max()
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        SymbolicConstant {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * r)).collect(),
        }
    }

    pub fn scale_int(&self, k: i64) -> Self {
        self.scale(&BigRational::from_integer(k.into()))
    }

    fn add_term(&mut self, m: ConstantMonomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    /// Canonical text in the generators `gamma`, `zeta(k)` with no π
    /// substitution.
    pub fn to_zeta_string(&self) -> String {
        self.render(false)
    }

    fn render(&self, pi_form: bool) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let mut coeff = c.clone();
            let mut factors: Vec<String> = Vec::new();
            if m.gamma == 1 {
                factors.push("gamma".into());
            } else if m.gamma > 1 {
                factors.push(format!("gamma^{}", m.gamma));
            }
            for (k, e) in m.zeta_factors() {
                if k == 2 && pi_form {
                    coeff /= BigRational::from_integer(num_traits::pow(BigInt::from(6), e as usize));
                    factors.push(format!("pi^{}", 2 * e));
                } else if e == 1 {
                    factors.push(format!("zeta({k})"));
                } else {
                    factors.push(format!("zeta({k})^{e}"));
                }
            }
            let negative = coeff.is_negative();
            let mag = coeff.abs();
            match (i, negative) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            let mag_str = if mag.is_integer() {
                mag.numer().to_string()
            } else {
                format!("{}/{}", mag.numer(), mag.denom())
            };
            if factors.is_empty() {
                out.push_str(&mag_str);
            } else {
                if !mag.is_one() {
                    out.push_str(&mag_str);
                    out.push('*');
                }
                out.push_str(&factors.join("*"));
            }
        }
        out
    }
}

impl fmt::Display for SymbolicConstant {
    /// Canonical form: monomials sorted by weight, explicit rationals, ζ(2)
    /// written as π²/6.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(true))
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Domain(format!("bad rational '{s}'"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.parse().map_err(|_| bad())?;
            let d: BigInt = d.parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

fn parse_term(s: &str) -> Result<SymbolicConstant> {
    let bad = |what: &str| Error::Domain(format!("cannot parse factor '{what}' in '{s}'"));
    let mut coeff = BigRational::one();
    let mut mono = ConstantMonomial::one();
    for factor in s.split('*').map(str::trim) {
        let (base, exp) = match factor.rsplit_once('^') {
            Some((b, e)) => (b, e.parse::<u32>().map_err(|_| bad(factor))?),
            None => (factor, 1),
        };
        if exp == 0 {
            return Err(bad(factor));
        }
        if base == "gamma" {
            mono.gamma += exp;
        } else if base == "pi" {
            if exp % 2 != 0 {
                return Err(bad(factor));
            }
            let m = exp / 2;
            coeff *= BigRational::from_integer(num_traits::pow(BigInt::from(6), m as usize));
            mono = mono.mul(&ConstantMonomial { gamma: 0, zeta: vec![m] });
        } else if let Some(k) = base.strip_prefix("zeta(").and_then(|r| r.strip_suffix(')')) {
            let k: u32 = k.parse().map_err(|_| bad(factor))?;
            if k < 2 {
                return Err(bad(factor));
            }
            let mut z = ConstantMonomial::zeta(k);
            z.zeta[k as usize - 2] = exp;
            mono = mono.mul(&z);
        } else if base.starts_with(|c: char| c.is_ascii_digit()) && exp == 1 {
            coeff *= parse_rational(base)?;
        } else {
            return Err(bad(factor));
        }
    }
    Ok(SymbolicConstant::term(coeff, mono))
}

impl FromStr for SymbolicConstant {
    type Err = Error;

    /// Parses the output of `Display` or [`SymbolicConstant::to_zeta_string`].
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Domain("empty constant".into()));
        }
        let mut acc = SymbolicConstant::zero();
        let mut rest = s;
        let mut negative = false;
        if let Some(r) = rest.strip_prefix('-') {
            negative = true;
            rest = r;
        }
        loop {
            let next = [" + ", " - "]
                .iter()
                .filter_map(|sep| rest.find(sep).map(|i| (i, *sep)))
                .min_by_key(|&(i, _)| i);
            let (term, tail) = match next {
                Some((i, sep)) => (&rest[..i], Some((&rest[i + 3..], sep == " - "))),
                None => (rest, None),
            };
            let t = parse_term(term)?;
            acc = if negative { &acc - &t } else { &acc + &t };
            match tail {
                Some((r, neg)) => {
                    rest = r;
                    negative = neg;
                }
                None => break,
            }
        }
        Ok(acc)
    }
}

impl<'a> Add<&'a SymbolicConstant> for &'a SymbolicConstant {
    type Output = SymbolicConstant;

    fn add(self, rhs: &SymbolicConstant) -> SymbolicConstant {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a SymbolicConstant> for &'a SymbolicConstant {
    type Output = SymbolicConstant;

    fn sub(self, rhs: &SymbolicConstant) -> SymbolicConstant {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl<'a> Mul<&'a SymbolicConstant> for &'a SymbolicConstant {
    type Output = SymbolicConstant;

    fn mul(self, rhs: &SymbolicConstant) -> SymbolicConstant {
        let mut out = SymbolicConstant::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &SymbolicConstant {
    type Output = SymbolicConstant;

    fn neg(self) -> SymbolicConstant {
        self.scale_int(-1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> SymbolicConstant {
        s.parse().unwrap()
    }

    #[test]
    fn canonical_rendering() {
        let g = SymbolicConstant::gamma();
        let pi2 = SymbolicConstant::pi_squared();
        let c2 = &(&g * &g) + &pi2.scale(&BigRational::new(1.into(), 12.into()));
        assert_eq!(c2.to_string(), "gamma^2 + 1/12*pi^2");
        assert_eq!(c2.to_zeta_string(), "gamma^2 + 1/2*zeta(2)");
        let b3 = parse("-4*gamma^3 - gamma*pi^2 - 8/3*zeta(3)");
        assert_eq!(b3.to_string(), "-4*gamma^3 - gamma*pi^2 - 8/3*zeta(3)");
        assert_eq!(SymbolicConstant::zero().to_string(), "0");
        assert_eq!(SymbolicConstant::one().to_string(), "1");
        assert_eq!(parse("1 - 2*gamma").to_string(), "1 - 2*gamma");
    }

    #[test]
    fn arithmetic_is_exact() {
        let g = SymbolicConstant::gamma();
        let one = SymbolicConstant::one();
        let a = &one + &g;
        let b = &one - &g;
        assert_eq!(&a * &b, &one - &(&g * &g));
        assert!((&a - &a).is_zero());
        assert_eq!(-&g, parse("-gamma"));
        let z2 = SymbolicConstant::zeta(2);
        assert_eq!(parse("pi^4"), (&z2 * &z2).scale_int(36));
        assert_eq!(parse("zeta(2)^2").to_string(), "1/36*pi^4");
    }

    #[test]
    fn parser_rejects_garbage() {
        for s in ["", "gamma^0", "pi^3", "zeta(1)", "foo", "1/0", "2*"] {
            assert!(s.parse::<SymbolicConstant>().is_err(), "{s}");
        }
    }

    #[test]
    fn monomial_order() {
        let g3 = ConstantMonomial { gamma: 3, zeta: vec![] };
        let gz2 = ConstantMonomial { gamma: 1, zeta: vec![1] };
        let z3 = ConstantMonomial::zeta(3);
        let mut v = vec![z3.clone(), gz2.clone(), g3.clone(), ConstantMonomial::gamma()];
        v.sort();
        assert_eq!(v, vec![ConstantMonomial::gamma(), g3, gz2, z3]);
        assert_eq!(ConstantMonomial::zeta(5).max_zeta(), Some(5));
        assert_eq!(ConstantMonomial::zeta(5).weight(), 5);
    }

    proptest::proptest! {
        #[test]
        fn display_parse_round_trip(
            terms in proptest::collection::vec((-50i64..50, 1i64..30, 0u32..4, 0u32..3, 0u32..2), 0..6)
        ) {
            let mut c = SymbolicConstant::zero();
            for (n, d, a, z2, z5) in terms {
                let mut zeta = vec![z2, 0, 0, z5];
                while zeta.last() == Some(&0) { zeta.pop(); }
                let m = ConstantMonomial { gamma: a, zeta };
                c = &c + &SymbolicConstant::term(BigRational::new(n.into(), d.into()), m);
            }
            proptest::prop_assert_eq!(c.to_string().parse::<SymbolicConstant>().unwrap(), c.clone());
            proptest::prop_assert_eq!(c.to_zeta_string().parse::<SymbolicConstant>().unwrap(), c);
        }
    }
}
