//! Truncated power series over [`SymbolicConstant`] and the coefficient
//! families of the counting-function expansions.
//!
//! * `C_k`: Taylor coefficients of Γ(1+w) at 0.
//! * `D_k`: Taylor coefficients of Γ(2+w) = (1+w)Γ(1+w).
//! * `c_k`: Σ c_k z^k = exp(Σ_{k≥1} (k−1)! C_k z^k).
//! * `b_k = Σ_{i+j=k} j! c_i C_j` and `d_k = Σ_{i+j=k} j! c_i D_j`.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::constants::{NumericContext, DEFAULT_MAX_DIGITS};
use crate::error::{Error, Result};
use crate::symbolic::SymbolicConstant;

/// Highest order any family is computed to.
pub const MAX_ORDER: usize = 12;

/// Significant digits in the `numeric` column of coefficient tables.
pub const DEFAULT_TABLE_DIGITS: u32 = 30;

pub const COEFFS_CSV_HEADER: &str = "k,family,symbolic,numeric";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalSeries {
    coeffs: Vec<SymbolicConstant>,
}

impl FormalSeries {
    pub fn zero(order: usize) -> Self {
        FormalSeries { coeffs: vec![SymbolicConstant::zero(); order + 1] }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = SymbolicConstant::one();
        s
    }

    /// Panics on an empty list; a series always has a constant term.
    pub fn from_coeffs(coeffs: Vec<SymbolicConstant>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least the constant term");
        FormalSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &SymbolicConstant {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[SymbolicConstant] {
        &self.coeffs
    }

    pub fn truncate(&self, order: usize) -> Self {
        assert!(order <= self.order(), "cannot extend a truncated series");
        FormalSeries { coeffs: self.coeffs[..=order].to_vec() }
    }

    /// Multiplies coefficient k by `f(k)`.
    pub fn map_scaled(&self, f: impl Fn(usize) -> BigRational) -> Self {
        FormalSeries {
            coeffs: self.coeffs.iter().enumerate().map(|(k, c)| c.scale(&f(k))).collect(),
        }
    }
}

fn factorial(k: usize) -> BigRational {
    BigRational::from_integer((1..=k).fold(BigInt::from(1), |acc, i| acc * BigInt::from(i)))
}

/// Cauchy product, truncated at the common order.
pub fn series_mul(a: &FormalSeries, b: &FormalSeries) -> Result<FormalSeries> {
    if a.order() != b.order() {
        return Err(Error::Domain(format!(
            "series orders differ: {} vs {}",
            a.order(),
            b.order()
        )));
    }
    let n = a.order();
    let mut out = FormalSeries::zero(n);
    for i in 0..=n {
        if a.coeffs[i].is_zero() {
            continue;
        }
        for j in 0..=n - i {
            if !b.coeffs[j].is_zero() {
                out.coeffs[i + j] = &out.coeffs[i + j] + &(&a.coeffs[i] * &b.coeffs[j]);
            }
        }
    }
    Ok(out)
}

/// exp(s) for s with zero constant term: e_0 = 1, n·e_n = Σ_{j=1..n} j·s_j·e_{n−j}.
pub fn series_exp(s: &FormalSeries) -> Result<FormalSeries> {
    if !s.coeffs[0].is_zero() {
        return Err(Error::Domain(format!(
            "exp needs a zero constant term, got {}",
            s.coeffs[0]
        )));
    }
    let n = s.order();
    let mut e = FormalSeries::one(n);
    for m in 1..=n {
        let mut acc = SymbolicConstant::zero();
        for j in 1..=m {
            if !s.coeffs[j].is_zero() {
                acc = &acc + &(&s.coeffs[j] * &e.coeffs[m - j]).scale_int(j as i64);
            }
        }
        e.coeffs[m] = acc.scale(&BigRational::new(1.into(), (m as i64).into()));
    }
    Ok(e)
}

/// log Γ(1+w) = −γw + Σ_{k≥2} (−1)^k ζ(k) w^k / k.
pub fn loggamma_at_1(order: usize) -> FormalSeries {
    let mut s = FormalSeries::zero(order);
    if order >= 1 {
        s.coeffs[1] = -&SymbolicConstant::gamma();
    }
    for k in 2..=order {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        s.coeffs[k] = SymbolicConstant::zeta(k as u32)
            .scale(&BigRational::new(sign.into(), (k as i64).into()));
    }
    s
}

fn check_order(order: usize) -> Result<()> {
    if order > MAX_ORDER {
        return Err(Error::Domain(format!("order {order} exceeds the maximum {MAX_ORDER}")));
    }
    Ok(())
}

/// C_k, the Taylor coefficients of Γ(1+w).
pub fn gamma_coeffs_at_1(order: usize) -> Result<FormalSeries> {
    check_order(order)?;
    series_exp(&loggamma_at_1(order))
}

/// D_k = C_k + C_{k−1}, the Taylor coefficients of Γ(2+w).
pub fn gamma_coeffs_at_2(order: usize) -> Result<FormalSeries> {
    let c = gamma_coeffs_at_1(order)?;
    let mut one_plus_w = FormalSeries::one(order);
    if order >= 1 {
        one_plus_w.coeffs[1] = SymbolicConstant::one();
    }
    series_mul(&one_plus_w, &c)
}

/// c_k from exp(Σ_{k≥1} (k−1)! C_k z^k).
pub fn c_coeffs(order: usize) -> Result<FormalSeries> {
    let big_c = gamma_coeffs_at_1(order)?;
    let mut inner = big_c.map_scaled(|k| if k == 0 { BigRational::from_integer(0.into()) } else { factorial(k - 1) });
    inner.coeffs[0] = SymbolicConstant::zero();
    series_exp(&inner)
}

/// b_k = Σ_{i+j=k} j! c_i C_j.
pub fn b_coeffs(order: usize) -> Result<FormalSeries> {
    let c = c_coeffs(order)?;
    let weighted = gamma_coeffs_at_1(order)?.map_scaled(factorial);
    series_mul(&c, &weighted)
}

/// d_k = Σ_{i+j=k} j! c_i D_j.
pub fn d_coeffs(order: usize) -> Result<FormalSeries> {
    let c = c_coeffs(order)?;
    let weighted = gamma_coeffs_at_2(order)?.map_scaled(factorial);
    series_mul(&c, &weighted)
}

/// Σ_{i+j=k} c_i D_j without the j! weight. Reproduces the closed forms
/// (−12γ + 15γ² + π²)/6 and (15γ² − 16γ³ + π² − 3γπ² − 6ζ(3))/6 that are
/// sometimes quoted for d_2 and d_3; kept only for comparison.
pub fn d_coeffs_unweighted(order: usize) -> Result<FormalSeries> {
    series_mul(&c_coeffs(order)?, &gamma_coeffs_at_2(order)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// Γ(1+w) coefficients.
    UpperC,
    /// Γ(2+w) coefficients.
    UpperD,
    LowerC,
    LowerB,
    LowerD,
}

impl Family {
    pub const ALL: [Family; 5] =
        [Family::UpperC, Family::UpperD, Family::LowerC, Family::LowerB, Family::LowerD];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::UpperC => "C",
            Family::UpperD => "D",
            Family::LowerC => "c",
            Family::LowerB => "b",
            Family::LowerD => "d",
        }
    }

    pub fn coefficients(self, order: usize) -> Result<FormalSeries> {
        match self {
            Family::UpperC => gamma_coeffs_at_1(order),
            Family::UpperD => gamma_coeffs_at_2(order),
            Family::LowerC => c_coeffs(order),
            Family::LowerB => b_coeffs(order),
            Family::LowerD => d_coeffs(order),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::Domain(format!("unknown family {s:?}; expected one of C, D, c, b, d")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientRow {
    pub k: usize,
    pub family: Family,
    pub symbolic: String,
    pub numeric: String,
}

/// Rows k = 0..=order of one family, numerics to `digits` significant digits.
pub fn coefficient_table(family: Family, order: usize, digits: u32) -> Result<Vec<CoefficientRow>> {
    let series = family.coefficients(order)?;
    NumericContext::new(digits)?;
    let ctx = NumericContext::new(DEFAULT_MAX_DIGITS)?;
    series
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| {
            Ok(CoefficientRow {
                k,
                family,
                symbolic: c.to_string(),
                numeric: ctx.eval(c)?.to_string_sig(digits as usize),
            })
        })
        .collect()
}

/// Writes a coefficient table as CSV. For the d family at order ≥ 2 a
/// trailing `#` line lists the unweighted convolution values for contrast.
pub fn write_coefficient_csv<W: Write>(
    out: &mut W,
    family: Family,
    order: usize,
    digits: u32,
) -> Result<()> {
    let rows = coefficient_table(family, order, digits)?;
    writeln!(out, "{COEFFS_CSV_HEADER}")?;
    for r in &rows {
        writeln!(out, "{},{},{},{}", r.k, r.family, r.symbolic, r.numeric)?;
    }
    if family == Family::LowerD && order >= 2 {
        let alt = d_coeffs_unweighted(order.min(3))?;
        let ctx = NumericContext::new(DEFAULT_MAX_DIGITS)?;
        for k in 2..=order.min(3) {
            let v = ctx.eval(alt.coeff(k))?.to_string_sig(digits as usize);
            writeln!(
                out,
                "# d_{k} without the j! weight would be {} = {v}; the table uses the weighted recurrence",
                alt.coeff(k)
            )?;
        }
    }
    Ok(())
}
