//! Closed-form expectations and limit laws.
//!
//! Finite-`n` quantities are exact rationals; limits are `f64`.

use std::fmt;
use std::ops::{Add, Div, Mul, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// An exact rational in lowest terms with positive denominator.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RationalValue(BigRational);

impl RationalValue {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Self {
        Self(BigRational::new(numer.into(), denom.into()))
    }

    pub fn integer(v: impl Into<BigInt>) -> Self {
        Self(BigRational::from_integer(v.into()))
    }

    pub fn zero() -> Self {
        Self(BigRational::zero())
    }

    pub fn one() -> Self {
        Self(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }
}

impl From<BigRational> for RationalValue {
    fn from(r: BigRational) -> Self {
        Self(r)
    }
}

impl From<BigUint> for RationalValue {
    fn from(v: BigUint) -> Self {
        Self::integer(BigInt::from(v))
    }
}

macro_rules! binop {
    ($tr:ident, $f:ident) => {
        impl $tr for RationalValue {
            type Output = RationalValue;
            fn $f(self, rhs: RationalValue) -> RationalValue {
                RationalValue(self.0.$f(rhs.0))
            }
        }
        impl<'a> $tr<&'a RationalValue> for &'a RationalValue {
            type Output = RationalValue;
            fn $f(self, rhs: &'a RationalValue) -> RationalValue {
                RationalValue((&self.0).$f(&rhs.0))
            }
        }
    };
}
binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

/// Always written `p/q`, also for integers.
impl fmt::Display for RationalValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl FromStr for RationalValue {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Syntax(format!("bad rational {s:?}"));
        let (p, q) = s.split_once('/').unwrap_or((s, "1"));
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        Ok(Self::new(p, q))
    }
}

impl Serialize for RationalValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn out_of_range(msg: String) -> Error {
    Error::OutOfRange(msg)
}

/// `m!!` for odd `m >= -1`, with `(-1)!! = 1`.
pub fn double_factorial(m: i64) -> Result<BigUint> {
    if m < -1 {
        return Err(out_of_range(format!("double factorial needs m >= -1, got {m}")));
    }
    if m % 2 == 0 {
        return Err(Error::EvenArgument(m));
    }
    let mut acc = BigUint::one();
    let mut k = m;
    while k > 1 {
        acc *= BigUint::from(k as u64);
        k -= 2;
    }
    Ok(acc)
}

fn df(m: i64) -> RationalValue {
    double_factorial(m).expect("odd argument").into()
}

fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

fn q(p: i64, d: i64) -> RationalValue {
    RationalValue::new(p, d)
}

fn check_k(n: u64, k: u64, min_n: u64) -> Result<()> {
    if n < min_n {
        return Err(out_of_range(format!("need n >= {min_n}, got n = {n}")));
    }
    if k + 1 > n {
        return Err(out_of_range(format!("need 0 <= k <= n - 1 = {}, got k = {k}", n - 1)));
    }
    Ok(())
}

/// Expected number of chords inside the shorter block of a chord of length
/// `k`: `k(k-1) / (2(2n-3))`.
pub fn mean_xk(n: u64, k: u64) -> Result<RationalValue> {
    check_k(n, k, 2)?;
    let (n, k) = (n as i64, k as i64);
    Ok(q(k * (k - 1), 2 * (2 * n - 3)))
}

/// Variance of the same count:
/// `k(k-1) / (2(2n-3)²(2n-5)) · [(2n-k)² - 10n + 5k + 6]`.
pub fn var_xk(n: u64, k: u64) -> Result<RationalValue> {
    check_k(n, k, 3)?;
    let (n, k) = (n as i64, k as i64);
    let front = q(k * (k - 1), 2 * (2 * n - 3) * (2 * n - 3) * (2 * n - 5));
    let bracket = (2 * n - k) * (2 * n - k) - 10 * n + 5 * k + 6;
    Ok(front * RationalValue::integer(bracket))
}

/// The bound `k²(2n-k)²/n³` on [`var_xk`].
pub fn var_xk_bound(n: u64, k: u64) -> Result<RationalValue> {
    check_k(n, k, 3)?;
    let (n, k) = (n as i64, k as i64);
    let top = BigInt::from(k * k) * BigInt::from((2 * n - k) * (2 * n - k));
    Ok(RationalValue::new(top, BigInt::from(n).pow(3)))
}

/// Limit of `P(deg(c_1) <= b n)`: `1 - sqrt(1 - 2b)` on `[0, 1/2]`.
pub fn degree_cdf_limit(b: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&b) {
        return Err(out_of_range(format!("b must lie in [0, 1/2], got {b}")));
    }
    Ok(1.0 - (1.0 - 2.0 * b).sqrt())
}

/// `P(length of c_1 = k)`: `2/(2n-1)` for `k <= n-2`, `1/(2n-1)` for `k = n-1`.
pub fn length_dist_c1(n: u64, k: u64) -> Result<RationalValue> {
    check_k(n, k, 1)?;
    let d = 2 * n as i64 - 1;
    Ok(if k + 1 == n { q(1, d) } else { q(2, d) })
}

/// `E[L_j] = 2n/(2n-1)` for `j <= n-2`.
pub fn mean_lj(n: u64, j: u64) -> Result<RationalValue> {
    if n < 2 || j + 2 > n {
        return Err(out_of_range(format!("need n >= 2 and j <= n - 2, got n = {n}, j = {j}")));
    }
    let n = n as i64;
    Ok(q(2 * n, 2 * n - 1))
}

/// `E[Z_k] = k + k/(2n-1)`.
pub fn mean_zk(n: u64, k: u64) -> Result<RationalValue> {
    check_k(n, k, 1)?;
    let (n, k) = (n as i64, k as i64);
    Ok(RationalValue::integer(k) + q(k, 2 * n - 1))
}

/// `E[Z_k(Z_k - 1)] = 2nk(2nk - 4k + 1) / ((2n-1)(2n-3))`.
pub fn second_factorial_zk(n: u64, k: u64) -> Result<RationalValue> {
    check_k(n, k, 2)?;
    let (n, k) = (n as i64, k as i64);
    Ok(q(2 * n * k * (2 * n * k - 4 * k + 1), (2 * n - 1) * (2 * n - 3)))
}

/// `E[B_k] = 2n (2k-1)!! (2n-2k-1)!! / (2n-1)!!`, where `B_k` counts the
/// blocks of `2k` consecutive endpoints covered by `k` chords. At `k = n`
/// this is `2n`, matching a count over all `2n` starting points.
pub fn mean_block_sets(n: u64, k: u64) -> Result<RationalValue> {
    if k == 0 || k > n {
        return Err(out_of_range(format!("need 1 <= k <= n = {n}, got k = {k}")));
    }
    let (n, k) = (n as i64, k as i64);
    Ok(RationalValue::integer(2 * n) * df(2 * k - 1) * df(2 * n - 2 * k - 1) / df(2 * n - 1))
}

/// Expected number of non-crossing `r`-sets of chords:
/// `C(2n, 2r) (2n-2r-1)!! / (2n-1)!! · Cat(r)`.
pub fn mean_independent_sets(n: u64, r: u64) -> Result<RationalValue> {
    if r == 0 || r > n {
        return Err(out_of_range(format!("need 1 <= r <= n = {n}, got r = {r}")));
    }
    let choose: RationalValue = binomial(2 * n, 2 * r).into();
    let catalan = RationalValue::from(binomial(2 * r, r)) / RationalValue::integer(r + 1);
    Ok(choose * df(2 * (n - r) as i64 - 1) / df(2 * n as i64 - 1) * catalan)
}

/// Poisson probability mass `e^{-λ} λ^j / j!`, computed in log space.
pub fn poisson_pmf(lambda: f64, j: u64) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(out_of_range(format!("lambda must be positive, got {lambda}")));
    }
    let log_fact: f64 = (2..=j).map(|i| (i as f64).ln()).sum();
    Ok((-lambda + j as f64 * lambda.ln() - log_fact).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> RationalValue {
        s.parse().unwrap()
    }

    #[test]
    fn double_factorials() {
        assert_eq!(double_factorial(5).unwrap(), BigUint::from(15u32));
        assert_eq!(double_factorial(-1).unwrap(), BigUint::one());
        assert_eq!(double_factorial(7).unwrap(), BigUint::from(105u32));
        assert_eq!(double_factorial(4), Err(Error::EvenArgument(4)));
        assert!(double_factorial(-3).is_err());
    }

    #[test]
    fn small_values() {
        assert_eq!(mean_xk(6, 4).unwrap(), r("2/3"));
        assert_eq!(mean_xk(6, 0).unwrap(), r("0"));
        assert_eq!(mean_xk(6, 1).unwrap(), r("0"));
        assert_eq!(var_xk(6, 0).unwrap(), r("0"));
        assert_eq!(var_xk(6, 1).unwrap(), r("0"));
        assert_eq!(length_dist_c1(5, 2).unwrap(), r("2/9"));
        assert_eq!(length_dist_c1(5, 4).unwrap(), r("1/9"));
        let total = (0..5).fold(RationalValue::zero(), |acc, k| acc + length_dist_c1(5, k).unwrap());
        assert_eq!(total, RationalValue::one());
        assert_eq!(mean_lj(3, 0).unwrap(), r("6/5"));
        for k in 0..7 {
            assert_eq!(mean_zk(7, k).unwrap(), RationalValue::integer(k) * mean_lj(7, 0).unwrap());
        }
        assert_eq!(mean_block_sets(3, 1).unwrap(), r("6/5"));
        assert_eq!(mean_block_sets(4, 4).unwrap(), r("8"));
        assert_eq!(mean_independent_sets(3, 2).unwrap(), r("2"));
        assert_eq!(mean_independent_sets(3, 3).unwrap(), r("1/3"));
        for n in 1..12 {
            assert_eq!(mean_independent_sets(n, 1).unwrap(), RationalValue::integer(n));
        }
        assert!(mean_xk(6, 6).is_err());
        assert!(mean_lj(3, 2).is_err());
    }

    #[test]
    fn variance_bound() {
        for n in 3..=30 {
            for k in 0..n {
                assert!(var_xk(n, k).unwrap() <= var_xk_bound(n, k).unwrap(), "n={n} k={k}");
                assert!(!var_xk(n, k).unwrap().is_negative());
            }
        }
    }

    #[test]
    fn limits() {
        assert_eq!(degree_cdf_limit(0.0).unwrap(), 0.0);
        assert_eq!(degree_cdf_limit(0.5).unwrap(), 1.0);
        assert!((degree_cdf_limit(0.375).unwrap() - 0.5).abs() < 1e-15);
        assert!(degree_cdf_limit(0.6).is_err());
        let mut prev = -1.0;
        for i in 0..=100 {
            let v = degree_cdf_limit(i as f64 / 200.0).unwrap();
            assert!(v > prev);
            prev = v;
        }
        assert!((poisson_pmf(1.0, 0).unwrap() - 0.367_879_441_171_442_3).abs() < 1e-15);
        assert!((poisson_pmf(3.0, 0).unwrap() - (-3.0f64).exp()).abs() < 1e-15);
        let s: f64 = (0..=50).map(|j| poisson_pmf(1.0, j).unwrap()).sum();
        assert!((s - 1.0).abs() < 1e-12);
        assert!(poisson_pmf(0.0, 1).is_err());
    }
}
