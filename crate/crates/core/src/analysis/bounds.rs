//! Exact success-probability bounds over big integers and rationals.

use num_bigint::{BigInt, BigUint};
use num_rational::{BigRational, Ratio};
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// `-x log2 x - (1-x) log2 (1-x)` with `H(0) = H(1) = 0`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("binary entropy argument {x} outside [0, 1]")));
    }
    let term = |p: f64| if p == 0.0 { 0.0 } else { -p * p.log2() };
    Ok(term(x) + term(1.0 - x))
}

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

/// `sum_{l=0}^{t} C(n, l)`: the size of a Hamming ball of radius `t`.
pub fn binomial_prefix_sum(n: u64, t: u64) -> BigUint {
    let mut term = BigUint::one();
    let mut sum = BigUint::one();
    for l in 1..=t.min(n) {
        term = term * (n - l + 1) / l;
        sum += &term;
    }
    sum
}

/// `2^(k - n) * ball(n, t)` as an exact rational.
fn scaled_ball(n: u64, k: u64, t: u64) -> BigRational {
    let ball = BigInt::from(binomial_prefix_sum(n, t));
    let (num, den) = if k >= n {
        (ball << (k - n), BigInt::one())
    } else {
        (ball, BigInt::one() << (n - k))
    };
    BigRational::new(num, den)
}

/// Success probability of a decoder that corrects exactly the
/// `floor((d-1)/2)` guaranteed errors around each of `2^k` codewords.
pub fn ds_probability_optimal(n: u64, k: u64, d: u64) -> Result<BigRational> {
    if d < 1 || d > n {
        return Err(Error::Domain(format!("minimum distance {d} outside [1, {n}]")));
    }
    if k > n {
        return Err(Error::Domain(format!("dimension {k} exceeds length {n}")));
    }
    Ok(scaled_ball(n, k, (d - 1) / 2))
}

/// Bounds `2^(-n alpha) <= p <= 2^(-n (alpha - H(delta/2)))`, kept in log2 form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbabilityBounds {
    pub log2_lower: f64,
    pub log2_upper: f64,
}

impl ProbabilityBounds {
    pub fn lower(&self) -> f64 {
        self.log2_lower.exp2()
    }

    pub fn upper(&self) -> f64 {
        self.log2_upper.exp2()
    }
}

pub fn prop1_bounds(n: u64, alpha: f64, delta: f64) -> Result<ProbabilityBounds> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha {alpha} outside (0, 1)")));
    }
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::Domain(format!("delta {delta} outside (0, 1/2)")));
    }
    let n = n as f64;
    Ok(ProbabilityBounds {
        log2_lower: -n * alpha,
        log2_upper: -n * (alpha - binary_entropy(delta / 2.0)?),
    })
}

/// Upper bound on the success probability with the minimum distance replaced
/// by `floor(n * delta1)`.
pub fn g_bound(n: u64, k: u64, delta1: Ratio<u64>) -> Result<BigRational> {
    if *delta1.numer() == 0 || delta1 >= Ratio::from_integer(1) {
        return Err(Error::Domain(format!("delta1 {delta1} outside (0, 1)")));
    }
    if k > n {
        return Err(Error::Domain(format!("dimension {k} exceeds length {n}")));
    }
    let d = n * delta1.numer() / delta1.denom();
    if d < 1 {
        return Err(Error::Domain(format!("floor(n * delta1) = 0 for n = {n}, delta1 = {delta1}")));
    }
    Ok(scaled_ball(n, k, (d - 1) / 2))
}

/// Exact `1 / (1 - (1 - g)^M)`.
pub fn fshc_lower_bound_exact(n: u64, k: u64, delta1: Ratio<u64>, miners: u64) -> Result<BigRational> {
    if miners == 0 {
        return Err(Error::Domain("miner count must be positive".into()));
    }
    let g = g_bound(n, k, delta1)?;
    if g.is_zero() {
        return Err(Error::UndefinedMean);
    }
    let one = BigRational::one();
    let fail = num_traits::pow::pow(&one - &g, miners as usize);
    Ok((&one - fail).recip())
}

/// Lower bound on the expected first-success hash cycle for `M` miners.
pub fn fshc_lower_bound(n: u64, k: u64, delta1: Ratio<u64>, miners: u64) -> Result<f64> {
    let exact = fshc_lower_bound_exact(n, k, delta1, miners)?;
    Ok(rational_to_f64(&exact))
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() && (v != 0.0 || r.is_zero()) {
            return v;
        }
    }
    // fall back to log-domain for values outside f64's direct conversion
    let bits = |x: &BigInt| x.bits() as i64;
    let shift = bits(r.numer()) - bits(r.denom()) - 60;
    let scaled = if shift >= 0 {
        BigRational::new(r.numer().clone(), r.denom() << shift as u64)
    } else {
        BigRational::new(r.numer() << (-shift) as u64, r.denom().clone())
    };
    scaled.to_f64().unwrap_or(f64::NAN) * (shift as f64).exp2()
}

/// `sum_{l<=k} C(n,l) <= 2^{n H(k/n)}`, checked exactly through the identity
/// `2^{n H(k/n)} = n^n / (k^k (n-k)^(n-k))`.
pub fn entropy_sum_holds(n: u64, k: u64) -> bool {
    assert!(k >= 1 && 2 * k <= n);
    let lhs = binomial_prefix_sum(n, k) * BigUint::from(k).pow(k as u32)
        * BigUint::from(n - k).pow((n - k) as u32);
    lhs <= BigUint::from(n).pow(n as u32)
}

/// Published relative-distance upper bounds `delta1` for regular
/// `(w_c, w_r)` ensembles. Input data, not computed.
pub fn delta1_for(w_c: u16, w_r: u16) -> Option<Ratio<u64>> {
    match (w_c, w_r) {
        (4, 5) => Some(Ratio::new(3238, 10000)),
        (4, 8) => Some(Ratio::new(1765, 10000)),
        _ => None,
    }
}

/// A code design point for the theoretical bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct CodePoint {
    pub n: u64,
    pub k: u64,
    pub w_c: u16,
    pub w_r: u16,
    pub delta1: Ratio<u64>,
}

impl CodePoint {
    /// Uses `k = n - m = n (1 - w_c / w_r)`.
    pub fn regular(n: u64, w_c: u16, w_r: u16, delta1: Ratio<u64>) -> Result<Self> {
        let cp = CodePoint {
            n,
            k: n - n * u64::from(w_c) / u64::from(w_r),
            w_c,
            w_r,
            delta1,
        };
        cp.validate()?;
        Ok(cp)
    }

    pub fn validate(&self) -> Result<()> {
        if self.w_c == 0 || self.w_c >= self.w_r {
            return Err(Error::Domain(format!(
                "alpha = {}/{} outside (0, 1)",
                self.w_c, self.w_r
            )));
        }
        if *self.delta1.numer() == 0 || self.delta1 * 2 >= Ratio::from_integer(1) {
            return Err(Error::Domain(format!("delta1 {} outside (0, 1/2)", self.delta1)));
        }
        Ok(())
    }

    pub fn alpha(&self) -> f64 {
        f64::from(self.w_c) / f64::from(self.w_r)
    }
}

/// Expected block time `T = cycles * (c m n) / tau`.
pub fn block_time(tau: f64, expected_cycles: f64, m: u64, n: u64, cost: f64) -> Result<f64> {
    if !(tau > 0.0 && expected_cycles > 0.0 && cost > 0.0) || m == 0 || n == 0 {
        return Err(Error::Domain("block time inputs must be positive".into()));
    }
    Ok(expected_cycles * cost * m as f64 * n as f64 / tau)
}
