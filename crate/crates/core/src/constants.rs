//! High-precision values of γ and ζ(k), and numeric evaluation of
//! [`SymbolicConstant`]s.

use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::bigreal::{bits_for_digits, BigReal};
use crate::error::{Error, Result};
use crate::symbolic::SymbolicConstant;

/// Default ceiling on requested decimal digits.
pub const DEFAULT_MAX_DIGITS: u32 = 50;

/// Largest ζ argument a context can evaluate.
pub const MAX_ZETA_ARG: u32 = 40;

/// Euler–Mascheroni constant by the Brent–McMillan algorithm:
/// γ ≈ U/V with U = Σ A_k, V = Σ B_k,
/// B_k = B_{k−1} n²/k², A_k = (A_{k−1} n²/k + B_k)/k, A_0 = −ln n, B_0 = 1.
/// The truncation error is O(e^{−4n}).
pub fn euler_gamma(prec: u32) -> BigReal {
    let wp = prec + 32;
    let n = ((wp as f64) * std::f64::consts::LN_2 / 4.0).ceil() as i64 + 2;
    let n2 = BigReal::from_i64(n * n, wp);
    let mut a = -BigReal::from_i64(n, wp).ln();
    let mut b = BigReal::one(wp);
    let mut u = a.clone();
    let mut v = b.clone();
    let mut k = 1i64;
    loop {
        b = (&b * &n2).div_i64(k * k);
        a = (&(&a * &n2).div_i64(k) + &b).div_i64(k);
        u = &u + &a;
        v = &v + &b;
        let cutoff = v.magnitude_bits() - wp as i64 - 8;
        if k > n && b.magnitude_bits() < cutoff && (a.is_zero() || a.magnitude_bits() < cutoff) {
            break;
        }
        k += 1;
    }
    (&u / &v).with_prec(prec)
}

/// Bernoulli numbers B_0..=B_n as exact rationals (B_1 = −1/2).
pub fn bernoulli_numbers(n: usize) -> Vec<BigRational> {
    static CACHE: Mutex<Vec<BigRational>> = Mutex::new(Vec::new());
    let mut b = CACHE.lock().unwrap_or_else(|e| e.into_inner());
    if b.is_empty() {
        b.push(BigRational::one());
    }
    // Σ_{j=0}^{m} C(m+1, j) B_j = 0
    for m in b.len()..=n {
        let mut acc = BigRational::zero();
        let mut binom = BigInt::one(); // C(m+1, j)
        for (j, bj) in b.iter().enumerate() {
            acc += bj * BigRational::from_integer(binom.clone());
            binom = binom * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
        }
        // binom is now C(m+1, m)
        b.push(-acc / BigRational::from_integer(binom));
    }
    b[..=n].to_vec()
}

/// ζ(s) for integer s ≥ 2 by Euler–Maclaurin summation:
/// ζ(s) = Σ_{j<N} j^{−s} + N^{1−s}/(s−1) + N^{−s}/2
///        + Σ_{m≥1} B_{2m}/(2m)! · s(s+1)⋯(s+2m−2) · N^{−s−2m+1}.
pub fn zeta(s: u32, prec: u32) -> Result<BigReal> {
    if s < 2 {
        return Err(Error::Domain(format!("ζ({s}) is not finite or not supported")));
    }
    let wp = prec + 32;
    let big_n = (wp / 4).max(20) as i64;
    let s_i = s as i64;
    let mut sum = BigReal::zero(wp);
    for j in 1..big_n {
        let jj = BigReal::from_i64(j, wp).powi(s);
        sum = &sum + &(&BigReal::one(wp) / &jj);
    }
    let n_real = BigReal::from_i64(big_n, wp);
    let n_pow_s = n_real.powi(s);
    let inv_n_s = &BigReal::one(wp) / &n_pow_s; // N^{-s}
    sum = &sum + &(&n_real * &inv_n_s).div_i64(s_i - 1);
    sum = &sum + &inv_n_s.ldexp(-1);

    let inv_n2 = &BigReal::one(wp) / &(&n_real * &n_real);
    let max_terms = 2 * (wp as usize / 2 + 8);
    let mut bern = bernoulli_numbers(32.min(max_terms));
    // rising = s(s+1)…(s+2m−2) / (2m)!, npow = N^{−s−2m+1}
    let mut rising = BigRational::from_integer(BigInt::from(s));
    let mut factorial = BigInt::from(2);
    let mut npow = inv_n_s.div_i64(big_n);
    let mut prev_mag = i64::MAX;
    let mut m = 1usize;
    loop {
        if 2 * m >= bern.len() && bern.len() <= max_terms {
            bern = bernoulli_numbers((2 * bern.len()).min(max_terms + 1));
        }
        if 2 * m >= bern.len() {
            return Err(Error::Numeric(format!("Euler–Maclaurin did not converge for ζ({s})")));
        }
        let coeff = &bern[2 * m] * &rising / BigRational::from_integer(factorial.clone());
        let term = &BigReal::from_ratio(&coeff, wp) * &npow;
        let mag = term.magnitude_bits();
        if term.is_zero() || mag < -(wp as i64) - 8 {
            break;
        }
        if mag > prev_mag {
            return Err(Error::Numeric(format!("Euler–Maclaurin tail diverged for ζ({s})")));
        }
        prev_mag = mag;
        sum = &sum + &term;
        let m2 = 2 * m as i64;
        rising *= BigRational::from_integer(BigInt::from((s_i + m2 - 1) * (s_i + m2)));
        factorial *= BigInt::from((m2 + 1) * (m2 + 2));
        npow = &npow * &inv_n2;
        m += 1;
    }
    Ok(sum.with_prec(prec))
}

/// Values of γ and ζ(k) at a fixed precision, computed once and shared.
pub struct NumericContext {
    digits: u32,
    prec: u32,
    gamma: BigReal,
    zeta: Vec<OnceLock<BigReal>>,
}

impl NumericContext {
    /// Context for `digits` significant digits, at most [`DEFAULT_MAX_DIGITS`].
    pub fn new(digits: u32) -> Result<Self> {
        Self::with_max_digits(digits, DEFAULT_MAX_DIGITS)
    }

    pub fn with_max_digits(digits: u32, max_digits: u32) -> Result<Self> {
        if digits == 0 || digits > max_digits {
            return Err(Error::Resource(format!(
                "precision of {digits} digits is outside 1..={max_digits}"
            )));
        }
        let prec = bits_for_digits(digits);
        Ok(NumericContext {
            digits,
            prec,
            gamma: euler_gamma(prec),
            zeta: (0..=MAX_ZETA_ARG).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn gamma(&self) -> &BigReal {
        &self.gamma
    }

    pub fn zeta(&self, k: u32) -> Result<&BigReal> {
        if !(2..=MAX_ZETA_ARG).contains(&k) {
            return Err(Error::Domain(format!("ζ({k}) outside 2..={MAX_ZETA_ARG}")));
        }
        let cell = &self.zeta[k as usize];
        if let Some(v) = cell.get() {
            return Ok(v);
        }
        let v = zeta(k, self.prec)?;
        Ok(cell.get_or_init(|| v))
    }

    /// Substitutes γ and ζ(k) into an exact constant.
    pub fn eval(&self, c: &SymbolicConstant) -> Result<BigReal> {
        let mut acc = BigReal::zero(self.prec);
        for (m, coeff) in c.terms() {
            let mut v = BigReal::from_ratio(coeff, self.prec);
            if m.gamma_exponent() > 0 {
                v = &v * &self.gamma.powi(m.gamma_exponent());
            }
            for (k, e) in m.zeta_factors() {
                v = &v * &self.zeta(k)?.powi(e);
            }
            acc = &acc + &v;
        }
        Ok(acc)
    }

    pub fn eval_f64(&self, c: &SymbolicConstant) -> Result<f64> {
        Ok(self.eval(c)?.to_f64())
    }
}

/// Evaluates `c` to `digits` significant digits with a fresh context.
pub fn eval_numeric(c: &SymbolicConstant, digits: u32) -> Result<BigReal> {
    NumericContext::new(digits)?.eval(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigreal::pi;

    const GAMMA_60: &str = "0.577215664901532860606512090082402431042159335939923598805767";
    const ZETA3_50: &str = "1.2020569031595942853997381615114499907649862923405";

    #[test]
    fn gamma_digits() {
        let g = euler_gamma(bits_for_digits(60));
        assert_eq!(g.to_string_sig(60), GAMMA_60[..62]);
    }

    #[test]
    fn zeta_known_values() {
        let p = bits_for_digits(50);
        let pi = pi(p);
        let pi2 = &pi * &pi;
        let z2 = zeta(2, p).unwrap();
        let err = (&z2 - &pi2.div_i64(6)).abs();
        assert!(err.magnitude_bits() < -(bits_for_digits(48) as i64));
        let z4 = zeta(4, p).unwrap();
        let err = (&z4 - &(&pi2 * &pi2).div_i64(90)).abs();
        assert!(err.magnitude_bits() < -(bits_for_digits(48) as i64));
        assert_eq!(zeta(3, p).unwrap().to_string_sig(50), ZETA3_50);
        let z12 = zeta(12, p).unwrap();
        // ζ(12) = 691 π^12 / 638512875
        let exact = &pi2.powi(6).mul_i64(691) / &BigReal::from_i64(638_512_875, p);
        assert!((&z12 - &exact).abs().magnitude_bits() < -(bits_for_digits(48) as i64));
        assert!(zeta(1, p).is_err());
    }

    #[test]
    fn bernoulli_small() {
        let b = bernoulli_numbers(12);
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(b[1], r(-1, 2));
        assert_eq!(b[2], r(1, 6));
        assert_eq!(b[4], r(-1, 30));
        assert_eq!(b[12], r(-691, 2730));
        assert!(b[3].is_zero() && b[11].is_zero());
    }

    #[test]
    fn eval_examples() {
        let ctx = NumericContext::new(50).unwrap();
        assert_eq!(ctx.eval(&SymbolicConstant::one()).unwrap().to_f64(), 1.0);
        let minus_two_gamma = SymbolicConstant::gamma().scale_int(-2);
        assert_eq!(
            ctx.eval(&minus_two_gamma).unwrap().to_string_sig(11),
            "-1.1544313298"
        );
        let pi2_over_4: SymbolicConstant = "1/4*pi^2".parse().unwrap();
        assert_eq!(ctx.eval(&pi2_over_4).unwrap().to_string_sig(11), "2.4674011003");
        assert!(NumericContext::new(51).is_err());
        assert!(NumericContext::new(0).is_err());
        assert!(ctx.eval(&SymbolicConstant::zeta(MAX_ZETA_ARG + 1)).is_err());
    }
}
