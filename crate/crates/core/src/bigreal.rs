//! Binary floating-point numbers of arbitrary precision.
//!
//! A [`BigReal`] is `mantissa · 2^exponent` with the mantissa rounded to at
//! most `prec` bits after every operation. Only what the constant and
//! quadrature code needs is provided: field operations, square root, exp,
//! ln, π and decimal formatting.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Mutex;

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Bits of working precision for `digits` significant decimal digits, plus
/// guard bits.
pub fn bits_for_digits(digits: u32) -> u32 {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 24
}

#[derive(Clone)]
pub struct BigReal {
    mant: BigInt,
    exp: i64,
    prec: u32,
}

impl BigReal {
    pub fn zero(prec: u32) -> Self {
        BigReal { mant: BigInt::zero(), exp: 0, prec }
    }

    pub fn one(prec: u32) -> Self {
        Self::from_i64(1, prec)
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        Self::normalize(BigInt::from(v), 0, prec)
    }

    pub fn from_bigint(v: BigInt, prec: u32) -> Self {
        Self::normalize(v, 0, prec)
    }

    pub fn from_ratio(r: &BigRational, prec: u32) -> Self {
        Self::from_fraction(r.numer(), r.denom(), prec)
    }

    pub fn from_fraction(num: &BigInt, den: &BigInt, prec: u32) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Self::zero(prec);
        }
        let shift = prec as i64 + 2 + den.bits() as i64 - num.bits() as i64;
        let (q, exp) = if shift >= 0 {
            ((num << shift as usize) / den, -shift)
        } else {
            (num / (den << (-shift) as usize), -shift)
        };
        Self::normalize(q, exp, prec)
    }

    /// Exact conversion of a finite `f64`.
    pub fn from_f64(v: f64, prec: u32) -> Self {
        assert!(v.is_finite(), "non-finite f64");
        if v == 0.0 {
            return Self::zero(prec);
        }
        let bits = v.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if raw_exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), raw_exp - 1075)
        };
        Self::normalize(BigInt::from(m as i64 * sign), e, prec)
    }

    fn normalize(mant: BigInt, exp: i64, prec: u32) -> Self {
        if mant.is_zero() {
            return Self::zero(prec);
        }
        let bits = mant.bits();
        if bits <= prec as u64 {
            return BigReal { mant, exp, prec };
        }
        let shift = bits - prec as u64;
        let sign = mant.sign();
        let half = BigUint::one() << (shift - 1);
        let mut mag = (mant.magnitude() + half) >> shift;
        let mut exp = exp + shift as i64;
        if mag.bits() > prec as u64 {
            mag >>= 1u32;
            exp += 1;
        }
        BigReal { mant: BigInt::from_biguint(sign, mag), exp, prec }
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        Self::normalize(self.mant.clone(), self.exp, prec)
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn signum(&self) -> i32 {
        match self.mant.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    /// ⌊log2 |x|⌋ + 1, or `i64::MIN` for zero.
    pub fn magnitude_bits(&self) -> i64 {
        if self.is_zero() {
            i64::MIN
        } else {
            self.exp + self.mant.bits() as i64
        }
    }

    pub fn abs(&self) -> Self {
        BigReal { mant: self.mant.abs(), exp: self.exp, prec: self.prec }
    }

    /// Multiplies by 2^k exactly.
    pub fn ldexp(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        BigReal { mant: self.mant.clone(), exp: self.exp + k, prec: self.prec }
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        Self::normalize(&self.mant * k, self.exp, self.prec)
    }

    pub fn div_i64(&self, k: i64) -> Self {
        self / &BigReal::from_i64(k, self.prec)
    }

    pub fn powi(&self, mut n: u32) -> Self {
        let mut acc = BigReal::one(self.prec);
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn sqrt(&self) -> Self {
        assert!(self.signum() >= 0, "square root of a negative number");
        if self.is_zero() {
            return self.clone();
        }
        let target = 2 * self.prec as i64 + 2;
        let mut shift = (target - self.mant.bits() as i64).max(0);
        if (self.exp - shift).rem_euclid(2) != 0 {
            shift += 1;
        }
        let m = self.mant.magnitude() << shift as usize;
        let r = m.sqrt();
        Self::normalize(BigInt::from(r), (self.exp - shift) / 2, self.prec)
    }

    /// e^x. Results below 2^(−2^40) flush to zero.
    pub fn exp(&self) -> Self {
        let prec = self.prec;
        if self.is_zero() {
            return BigReal::one(prec);
        }
        if self.magnitude_bits() > 40 {
            assert!(self.signum() < 0, "exp overflow");
            return BigReal::zero(prec);
        }
        let xf = self.to_f64();
        let n = (xf / std::f64::consts::LN_2).round() as i64;
        let extra = 64 - (n.unsigned_abs().leading_zeros()) + 16;
        let wp = prec + extra + 16;
        let x = self.with_prec(wp);
        let r = &x - &ln2(wp).mul_i64(n);
        // |r| ≤ ln2/2; halve 16 more times and square back.
        const HALVINGS: i64 = 16;
        let r = r.ldexp(-HALVINGS);
        let mut sum = BigReal::one(wp);
        let mut term = BigReal::one(wp);
        let mut i = 1i64;
        loop {
            term = (&term * &r).div_i64(i);
            if term.is_zero() || term.magnitude_bits() < -(wp as i64) - 4 {
                break;
            }
            sum = &sum + &term;
            i += 1;
        }
        for _ in 0..HALVINGS {
            sum = &sum * &sum;
        }
        sum.ldexp(n).with_prec(prec)
    }

    /// Natural logarithm of a positive number.
    pub fn ln(&self) -> Self {
        assert!(self.signum() > 0, "logarithm of a non-positive number");
        let prec = self.prec;
        let wp = prec + 16;
        let bits = self.mant.bits() as i64;
        let e2 = self.exp + bits;
        // f ∈ [1/2, 1)
        let f = BigReal { mant: self.mant.clone(), exp: -bits, prec: wp };
        let one = BigReal::one(wp);
        let z = &(&f - &one) / &(&f + &one);
        let z2 = &z * &z;
        let mut power = z.clone();
        let mut sum = z;
        let mut k = 3i64;
        loop {
            power = &power * &z2;
            if power.is_zero() || power.magnitude_bits() < -(wp as i64) - 4 {
                break;
            }
            sum = &sum + &power.div_i64(k);
            k += 2;
        }
        let ln_f = sum.ldexp(1);
        let e2_bits = 64 - e2.unsigned_abs().leading_zeros();
        let ln2 = ln2(wp + e2_bits);
        (&ln_f + &ln2.mul_i64(e2)).with_prec(prec)
    }

    /// (sinh x, cosh x).
    pub fn sinh_cosh(&self) -> (Self, Self) {
        let e = self.exp();
        let inv = &BigReal::one(self.prec) / &e;
        ((&e - &inv).ldexp(-1), (&e + &inv).ldexp(-1))
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits() as i64;
        let (m, e) = if bits > 63 {
            ((&self.mant >> (bits - 63) as usize), self.exp + bits - 63)
        } else {
            (self.mant.clone(), self.exp)
        };
        let mut v = m.to_i64().expect("63-bit mantissa") as f64;
        let mut e = e;
        while e > 1000 {
            v *= 2f64.powi(1000);
            e -= 1000;
            if v.is_infinite() {
                return v;
            }
        }
        while e < -1000 {
            v *= 2f64.powi(-1000);
            e += 1000;
            if v == 0.0 {
                return v;
            }
        }
        v * 2f64.powi(e as i32)
    }

    /// round(|x| · 10^k) as an integer.
    fn scaled_decimal(&self, k: i64) -> BigInt {
        let mut num = BigInt::from(self.mant.magnitude().clone());
        let mut den = BigInt::one();
        let ten = BigInt::from(10);
        if k >= 0 {
            num *= num_traits::pow(ten, k as usize);
        } else {
            den *= num_traits::pow(ten, (-k) as usize);
        }
        if self.exp >= 0 {
            num <<= self.exp as usize;
        } else {
            den <<= (-self.exp) as usize;
        }
        (num * 2 + &den) / (den * 2)
    }

    /// Decimal representation with `sig` significant digits; positional
    /// notation for moderate magnitudes, `d.ddde±N` otherwise.
    pub fn to_string_sig(&self, sig: usize) -> String {
        let sig = sig.max(1);
        if self.is_zero() {
            return if sig == 1 { "0".into() } else { format!("0.{}", "0".repeat(sig - 1)) };
        }
        let mut d = ((self.magnitude_bits() - 1) as f64 * std::f64::consts::LOG10_2).floor() as i64;
        let lower = num_traits::pow(BigInt::from(10), sig - 1);
        let upper = &lower * 10;
        let digits = loop {
            let n = self.scaled_decimal(sig as i64 - 1 - d);
            if n >= upper {
                d += 1;
            } else if n < lower {
                d -= 1;
            } else {
                break n.to_string();
            }
        };
        let sign = if self.signum() < 0 { "-" } else { "" };
        if (-8..=40).contains(&d) {
            if d < 0 {
                format!("{sign}0.{}{digits}", "0".repeat((-d - 1) as usize))
            } else {
                let int_len = d as usize + 1;
                if int_len >= sig {
                    format!("{sign}{digits}{}", "0".repeat(int_len - sig))
                } else {
                    format!("{sign}{}.{}", &digits[..int_len], &digits[int_len..])
                }
            }
        } else {
            let frac = &digits[1..];
            if frac.is_empty() {
                format!("{sign}{}e{d:+}", &digits[..1])
            } else {
                format!("{sign}{}.{frac}e{d:+}", &digits[..1])
            }
        }
    }
}

fn sum_atanh_inverse(k: i64, wp: u32) -> BigReal {
    // atanh(1/k) = Σ 1/((2i+1) k^(2i+1))
    let kk = BigReal::from_i64(k * k, wp);
    let mut power = BigReal::one(wp).div_i64(k);
    let mut sum = power.clone();
    let mut i = 3i64;
    loop {
        power = &power / &kk;
        let term = power.div_i64(i);
        if term.magnitude_bits() < -(wp as i64) - 4 {
            break;
        }
        sum = &sum + &term;
        i += 2;
    }
    sum
}

fn sum_atan_inverse(k: i64, wp: u32) -> BigReal {
    let kk = BigReal::from_i64(k * k, wp);
    let mut power = BigReal::one(wp).div_i64(k);
    let mut sum = power.clone();
    let mut i = 3i64;
    let mut negative = true;
    loop {
        power = &power / &kk;
        let term = power.div_i64(i);
        if term.magnitude_bits() < -(wp as i64) - 4 {
            break;
        }
        sum = if negative { &sum - &term } else { &sum + &term };
        negative = !negative;
        i += 2;
    }
    sum
}

fn cached(cache: &Mutex<Vec<BigReal>>, prec: u32, compute: impl Fn(u32) -> BigReal) -> BigReal {
    {
        let guard = cache.lock().unwrap();
        if let Some(v) = guard.iter().find(|v| v.prec >= prec) {
            return v.with_prec(prec);
        }
    }
    let v = compute(prec + 32);
    let out = v.with_prec(prec);
    cache.lock().unwrap().push(v);
    out
}

static LN2_CACHE: Mutex<Vec<BigReal>> = Mutex::new(Vec::new());
static PI_CACHE: Mutex<Vec<BigReal>> = Mutex::new(Vec::new());

/// ln 2 = 2·atanh(1/3).
pub fn ln2(prec: u32) -> BigReal {
    cached(&LN2_CACHE, prec, |wp| sum_atanh_inverse(3, wp).ldexp(1))
}

/// π by Machin's formula.
pub fn pi(prec: u32) -> BigReal {
    cached(&PI_CACHE, prec, |wp| {
        &sum_atan_inverse(5, wp).mul_i64(16) - &sum_atan_inverse(239, wp).mul_i64(4)
    })
}

impl<'a> Add<&'a BigReal> for &'a BigReal {
    type Output = BigReal;

    fn add(self, rhs: &BigReal) -> BigReal {
        let prec = self.prec.max(rhs.prec);
        if self.is_zero() {
            return rhs.with_prec(prec);
        }
        if rhs.is_zero() {
            return self.with_prec(prec);
        }
        let (ta, tb) = (self.magnitude_bits(), rhs.magnitude_bits());
        if ta < tb - prec as i64 - 4 {
            return rhs.with_prec(prec);
        }
        if tb < ta - prec as i64 - 4 {
            return self.with_prec(prec);
        }
        let e = self.exp.min(rhs.exp);
        let a = &self.mant << (self.exp - e) as usize;
        let b = &rhs.mant << (rhs.exp - e) as usize;
        BigReal::normalize(a + b, e, prec)
    }
}

impl<'a> Sub<&'a BigReal> for &'a BigReal {
    type Output = BigReal;

    fn sub(self, rhs: &BigReal) -> BigReal {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a BigReal> for &'a BigReal {
    type Output = BigReal;

    fn mul(self, rhs: &BigReal) -> BigReal {
        let prec = self.prec.max(rhs.prec);
        BigReal::normalize(&self.mant * &rhs.mant, self.exp + rhs.exp, prec)
    }
}

impl<'a> Div<&'a BigReal> for &'a BigReal {
    type Output = BigReal;

    fn div(self, rhs: &BigReal) -> BigReal {
        assert!(!rhs.is_zero(), "division by zero");
        let prec = self.prec.max(rhs.prec);
        if self.is_zero() {
            return BigReal::zero(prec);
        }
        let shift = (prec as i64 + 2 + rhs.mant.bits() as i64 - self.mant.bits() as i64).max(0);
        let q = (&self.mant << shift as usize) / &rhs.mant;
        BigReal::normalize(q, self.exp - rhs.exp - shift, prec)
    }
}

impl Neg for &BigReal {
    type Output = BigReal;

    fn neg(self) -> BigReal {
        BigReal { mant: -&self.mant, exp: self.exp, prec: self.prec }
    }
}

impl Neg for BigReal {
    type Output = BigReal;

    fn neg(self) -> BigReal {
        -&self
    }
}

impl PartialEq for BigReal {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for BigReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some((self - other).signum().cmp(&0))
    }
}

impl fmt::Debug for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigReal({})", self.to_string_sig(24))
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(20);
        f.write_str(&self.to_string_sig(digits))
    }
}
