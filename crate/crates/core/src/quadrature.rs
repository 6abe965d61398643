//! Tanh-sinh (double exponential) quadrature in [`BigReal`] arithmetic, and
//! the derivatives Γ^{(k)}(s) = ∫_0^∞ t^{s−1} e^{−t} (ln t)^k dt.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::bigreal::{bits_for_digits, pi, BigReal};
use crate::error::{Error, Result};

/// Highest derivative order supported by [`gamma_derivatives`].
pub const MAX_DERIVATIVE: usize = 12;

/// Level-doubling limit; level m uses step 2^{−m}.
pub const DEFAULT_MAX_LEVEL: u32 = 10;

const MIN_LEVEL: u32 = 3;

/// An abscissa in [a, b] with its distances to both ends, kept separately so
/// endpoint singularities can be evaluated without cancellation.
#[derive(Clone, Debug)]
pub struct Node {
    pub x: BigReal,
    pub from_a: BigReal,
    pub from_b: BigReal,
}

/// Node on [−1, 1] at t > 0: distance 1 − x to the right end, and weight.
#[derive(Clone)]
struct RawNode {
    dist: BigReal,
    weight: BigReal,
}

struct NodeTable {
    /// levels[0] holds t = 1, 2, …; levels[m] the odd multiples of 2^{−m}.
    levels: Vec<Arc<Vec<RawNode>>>,
    center_weight: BigReal,
}

fn node_cache() -> &'static Mutex<HashMap<u32, NodeTable>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, NodeTable>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Largest t whose weight is still above 2^{−(prec + 64)}.
fn t_max(prec: u32) -> f64 {
    let target = -((prec + 64) as f64) * std::f64::consts::LN_2;
    let mut t: f64 = 1.0;
    loop {
        let v = std::f64::consts::FRAC_PI_2 * t.sinh();
        let log_w = (std::f64::consts::FRAC_PI_2 * t.cosh()).ln() + 2f64.ln() - 2.0 * v;
        if log_w < target {
            return t;
        }
        t += 0.125;
    }
}

fn raw_node(t: &BigReal, half_pi: &BigReal) -> RawNode {
    let prec = t.prec();
    let (sh, ch) = t.sinh_cosh();
    let v = half_pi * &sh;
    // e = exp(−2v); 1 − tanh v = 2e/(1+e); sech² v = 4e/(1+e)²
    let e = (-v.ldexp(1)).exp();
    let one_plus = &BigReal::one(prec) + &e;
    let dist = &e.ldexp(1) / &one_plus;
    let sech2 = &e.ldexp(2) / &(&one_plus * &one_plus);
    RawNode { dist, weight: &(half_pi * &ch) * &sech2 }
}

fn level_nodes(prec: u32, level: u32) -> (Arc<Vec<RawNode>>, BigReal) {
    let mut cache = node_cache().lock().unwrap_or_else(|e| e.into_inner());
    let half_pi = pi(prec).ldexp(-1);
    let table = cache.entry(prec).or_insert_with(|| NodeTable {
        levels: Vec::new(),
        center_weight: half_pi.clone(),
    });
    let tmax = t_max(prec);
    while table.levels.len() <= level as usize {
        let m = table.levels.len() as u32;
        let mut nodes = Vec::new();
        let denom = 1i64 << m;
        let mut j = 1i64;
        let step = if m == 0 { 1 } else { 2 };
        while (j as f64) / (denom as f64) <= tmax {
            let t = BigReal::from_i64(j, prec).ldexp(-(m as i64));
            nodes.push(raw_node(&t, &half_pi));
            j += step;
        }
        table.levels.push(Arc::new(nodes));
    }
    (table.levels[level as usize].clone(), table.center_weight.clone())
}

/// Outcome of a quadrature: one value per integrand component.
#[derive(Clone, Debug)]
pub struct Quadrature {
    pub values: Vec<BigReal>,
    pub error_estimate: f64,
    pub level: u32,
    pub evaluations: usize,
}

/// Integrates a vector-valued `f` over [a, b] at `prec` bits, doubling the
/// level until successive estimates of every component differ by at most
/// `tol` (absolute).
pub fn tanh_sinh<F>(a: &BigReal, b: &BigReal, dim: usize, tol: f64, max_level: u32, mut f: F) -> Result<Quadrature>
where
    F: FnMut(&Node) -> Vec<BigReal>,
{
    let prec = a.prec();
    let half = (b - a).ldexp(-1);
    let two = BigReal::from_i64(2, prec);
    let mut sums = vec![BigReal::zero(prec); dim];
    let mut evaluations = 0usize;
    let mut accumulate = |sums: &mut Vec<BigReal>, node: Node, w: &BigReal, evals: &mut usize| {
        let vals = f(&node);
        *evals += 1;
        for (s, v) in sums.iter_mut().zip(vals.iter()) {
            if !v.is_zero() {
                *s = &*s + &(w * v);
            }
        }
    };

    let (_, center_w) = level_nodes(prec, 0);
    let mid = Node { x: a + &half, from_a: half.clone(), from_b: half.clone() };
    accumulate(&mut sums, mid, &center_w, &mut evaluations);

    let mut prev: Option<Vec<BigReal>> = None;
    let mut last_diff = f64::INFINITY;
    for level in 0..=max_level {
        let (nodes, _) = level_nodes(prec, level);
        for rn in nodes.iter() {
            let near = &half * &rn.dist;
            let far = &half * &(&two - &rn.dist);
            let right = Node { x: b - &near, from_a: far.clone(), from_b: near.clone() };
            let left = Node { x: a + &near, from_a: near, from_b: far };
            accumulate(&mut sums, right, &rn.weight, &mut evaluations);
            accumulate(&mut sums, left, &rn.weight, &mut evaluations);
        }
        let h = level as i64;
        let estimate: Vec<BigReal> = sums.iter().map(|s| (&half * s).ldexp(-h)).collect();
        if let Some(p) = &prev {
            last_diff = estimate
                .iter()
                .zip(p.iter())
                .map(|(x, y)| (x - y).to_f64().abs())
                .fold(0.0, f64::max);
            if level >= MIN_LEVEL && last_diff <= tol {
                return Ok(Quadrature { values: estimate, error_estimate: last_diff, level, evaluations });
            }
        }
        prev = Some(estimate);
    }
    Err(Error::Numeric(format!(
        "tanh-sinh did not reach tolerance {tol:e} by level {max_level} \
         (last change {last_diff:e}, {evaluations} evaluations)"
    )))
}

/// Scalar convenience wrapper over [`tanh_sinh`].
pub fn integrate<F>(a: &BigReal, b: &BigReal, tol: f64, f: F) -> Result<BigReal>
where
    F: Fn(&Node) -> BigReal,
{
    let q = tanh_sinh(a, b, 1, tol, DEFAULT_MAX_LEVEL, |n| vec![f(n)])?;
    Ok(q.values.into_iter().next().expect("one component"))
}

/// Γ^{(k)}(s) for k = 0..=kmax at `digits` precision; s ∈ {1, 2}. The
/// integral is split at t = 1, and [1, ∞) is mapped onto [0, 1) by
/// t = 1/(1 − u).
pub fn gamma_derivatives(kmax: usize, s: u32, digits: u32) -> Result<Vec<BigReal>> {
    if kmax > MAX_DERIVATIVE {
        return Err(Error::Domain(format!("derivative order {kmax} exceeds {MAX_DERIVATIVE}")));
    }
    if !(1..=2).contains(&s) {
        return Err(Error::Domain(format!("s = {s}; only s ∈ {{1, 2}} is supported")));
    }
    let prec = bits_for_digits(digits);
    let tol = 10f64.powi(-(digits as i32 * 3 / 5).max(13));
    let zero = BigReal::zero(prec);
    let one = BigReal::one(prec);
    let cutoff = (prec as f64 + 96.0) * std::f64::consts::LN_2;

    let powers = |ln_t: &BigReal, weight: BigReal| {
        let mut out = Vec::with_capacity(kmax + 1);
        let mut acc = weight;
        out.push(acc.clone());
        for _ in 0..kmax {
            acc = &acc * ln_t;
            out.push(acc.clone());
        }
        out
    };

    // t ∈ (0, 1]: t^{s−1} e^{−t} ln^k t
    let head = tanh_sinh(&zero, &one, kmax + 1, tol, DEFAULT_MAX_LEVEL, |n| {
        let t = &n.from_a;
        let mut w = (-t).exp();
        if s == 2 {
            w = &w * t;
        }
        powers(&t.ln(), w)
    })?;
    // u ∈ [0, 1): t = 1/(1−u), dt = t² du
    let tail = tanh_sinh(&zero, &one, kmax + 1, tol, DEFAULT_MAX_LEVEL, |n| {
        let t = &one / &n.from_b;
        if t.to_f64() > cutoff {
            return vec![BigReal::zero(prec); kmax + 1];
        }
        let mut w = &(-&t).exp() * &(&t * &t);
        if s == 2 {
            w = &w * &t;
        }
        powers(&t.ln(), w)
    })?;
    Ok(head.values.iter().zip(tail.values.iter()).map(|(x, y)| x + y).collect())
}

/// Γ^{(k)}(s) as an `f64`, accurate to well below 10^{−12}.
pub fn gamma_derivative_quadrature(k: usize, s: u32) -> Result<f64> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<f64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if k > MAX_DERIVATIVE {
        return Err(Error::Domain(format!("derivative order {k} exceeds {MAX_DERIVATIVE}")));
    }
    if let Some(v) = cache.lock().unwrap_or_else(|e| e.into_inner()).get(&s) {
        return Ok(v[k]);
    }
    let vals: Vec<f64> = gamma_derivatives(MAX_DERIVATIVE, s, 30)?.iter().map(BigReal::to_f64).collect();
    let vals = Arc::new(vals);
    cache.lock().unwrap_or_else(|e| e.into_inner()).insert(s, vals.clone());
    Ok(vals[k])
}

#[cfg(test)]
mod tests {
    use super::*;

    const GAMMA: f64 = 0.577_215_664_901_532_9;

    #[test]
    fn polynomial_and_endpoint_singularity() {
        let p = bits_for_digits(30);
        let zero = BigReal::zero(p);
        let one = BigReal::one(p);
        let cube = integrate(&zero, &one, 1e-25, |n| n.x.powi(3)).unwrap();
        assert!((cube.to_f64() - 0.25).abs() < 1e-15);
        // ∫_0^1 ln² t dt = 2
        let log2 = integrate(&zero, &one, 1e-25, |n| n.from_a.ln().powi(2)).unwrap();
        assert!((log2.to_f64() - 2.0).abs() < 1e-15);
        // ∫_0^1 dt/√t = 2
        let inv_sqrt = integrate(&zero, &one, 1e-20, |n| &one / &n.from_a.sqrt()).unwrap();
        assert!((inv_sqrt.to_f64() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn low_order_derivatives() {
        assert!((gamma_derivative_quadrature(0, 1).unwrap() - 1.0).abs() < 1e-14);
        assert!((gamma_derivative_quadrature(1, 1).unwrap() + GAMMA).abs() < 1e-14);
        assert!((gamma_derivative_quadrature(0, 2).unwrap() - 1.0).abs() < 1e-14);
        assert!((gamma_derivative_quadrature(1, 2).unwrap() - (1.0 - GAMMA)).abs() < 1e-14);
        // Γ''(1) = γ² + π²/6
        let g2 = GAMMA * GAMMA + std::f64::consts::PI.powi(2) / 6.0;
        assert!((gamma_derivative_quadrature(2, 1).unwrap() - g2).abs() < 1e-13);
    }

    #[test]
    fn out_of_range() {
        assert!(matches!(gamma_derivative_quadrature(13, 1), Err(Error::Domain(_))));
        assert!(matches!(gamma_derivatives(2, 3, 20), Err(Error::Domain(_))));
    }

    #[test]
    fn tolerance_failure_is_reported() {
        let p = bits_for_digits(20);
        let zero = BigReal::zero(p);
        let one = BigReal::one(p);
        let err = tanh_sinh(&zero, &one, 1, -1.0, 4, |n| vec![n.x.clone()]).unwrap_err();
        assert!(matches!(err, Error::Numeric(ref m) if m.contains("level 4")));
    }
}
