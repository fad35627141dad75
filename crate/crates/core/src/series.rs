//! Truncated power series with exact rational coefficients.
//!
//! The ring operations are exact; the truncation order is tracked
//! pessimistically (a result is only claimed through the order where every
//! contributing coefficient is fully known).

use crate::error::Error;
use crate::Result;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// A truncated power series `sum_{n=0}^{order} c_n x^n + O(x^{order+1})`
/// with exact rational coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalSeries {
    pub var: String,
    coeffs: Vec<BigRational>,
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl RationalSeries {
    pub fn from_coeffs(var: &str, coeffs: Vec<BigRational>) -> Self {
        assert!(!coeffs.is_empty());
        RationalSeries {
            var: var.to_string(),
            coeffs,
        }
    }

    pub fn zero(var: &str, order: usize) -> Self {
        RationalSeries {
            var: var.to_string(),
            coeffs: vec![BigRational::zero(); order + 1],
        }
    }

    pub fn one(var: &str, order: usize) -> Self {
        let mut s = Self::zero(var, order);
        s.coeffs[0] = BigRational::one();
        s
    }

    /// c * x^k + O(x^{order+1})
    pub fn monomial(var: &str, c: BigRational, k: usize, order: usize) -> Self {
        let mut s = Self::zero(var, order);
        if k <= order {
            s.coeffs[k] = c;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> BigRational {
        self.coeffs.get(n).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Index of the first nonzero coefficient, or None for the zero series.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut c = self.coeffs.clone();
        c.truncate(order + 1);
        while c.len() < order + 1 {
            c.push(BigRational::zero());
        }
        RationalSeries {
            var: self.var.clone(),
            coeffs: c,
        }
    }

    fn check_var(&self, other: &Self) {
        assert_eq!(self.var, other.var, "series variable mismatch");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_var(other);
        let n = self.order().min(other.order());
        let coeffs = (0..=n).map(|i| self.coeff(i) + other.coeff(i)).collect();
        RationalSeries {
            var: self.var.clone(),
            coeffs,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_var(other);
        let n = self.order().min(other.order());
        let coeffs = (0..=n).map(|i| self.coeff(i) - other.coeff(i)).collect();
        RationalSeries {
            var: self.var.clone(),
            coeffs,
        }
    }

    pub fn neg(&self) -> Self {
        RationalSeries {
            var: self.var.clone(),
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        RationalSeries {
            var: self.var.clone(),
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_var(other);
        let n = self.order().min(other.order());
        let mut coeffs = vec![BigRational::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(n + 1 - i) {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        RationalSeries {
            var: self.var.clone(),
            coeffs,
        }
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn inverse(&self) -> Result<Self> {
        if self.coeffs[0].is_zero() {
            return Err(Error::domain(
                "series inverse requires nonzero constant term".to_string(),
            ));
        }
        let n = self.order();
        let mut inv = vec![BigRational::zero(); n + 1];
        let c0 = self.coeffs[0].clone();
        inv[0] = BigRational::one() / &c0;
        for k in 1..=n {
            let mut s = BigRational::zero();
            for j in 0..k {
                let a = &self.coeffs[k - j];
                if !a.is_zero() && !inv[j].is_zero() {
                    s += a * &inv[j];
                }
            }
            inv[k] = -s / &c0;
        }
        Ok(RationalSeries {
            var: self.var.clone(),
            coeffs: inv,
        })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inverse()?))
    }

    /// Term-by-term derivative; the result is known one order lower.
    pub fn derivative(&self) -> Self {
        let n = self.order();
        let coeffs = (1..=n)
            .map(|i| &self.coeffs[i] * BigRational::from(BigInt::from(i)))
            .collect::<Vec<_>>();
        RationalSeries {
            var: self.var.clone(),
            coeffs: if coeffs.is_empty() {
                vec![BigRational::zero()]
            } else {
                coeffs
            },
        }
    }

    /// Multiply by x^k (shifting up; the claimed order does not grow).
    pub fn shift_up(&self, k: usize) -> Self {
        let n = self.order();
        let mut coeffs = vec![BigRational::zero(); n + 1];
        for i in 0..=n.saturating_sub(k) {
            coeffs[i + k] = self.coeffs[i].clone();
        }
        RationalSeries {
            var: self.var.clone(),
            coeffs,
        }
    }

    /// Divide by x^k; errors unless the valuation is at least k.
    pub fn shift_down(&self, k: usize) -> Result<Self> {
        for i in 0..k.min(self.coeffs.len()) {
            if !self.coeffs[i].is_zero() {
                return Err(Error::domain(format!(
                    "cannot divide by {}^{k}: valuation too small",
                    self.var
                )));
            }
        }
        let coeffs: Vec<_> = self.coeffs.iter().skip(k).cloned().collect();
        Ok(RationalSeries {
            var: self.var.clone(),
            coeffs: if coeffs.is_empty() {
                vec![BigRational::zero()]
            } else {
                coeffs
            },
        })
    }

    /// Composition self(g(x)) where g has zero constant term.
    pub fn compose(&self, g: &Self) -> Result<Self> {
        g.check_var(self);
        if !g.coeffs[0].is_zero() {
            return Err(Error::domain(
                "composition requires zero constant term in the inner series".to_string(),
            ));
        }
        let n = self.order().min(g.order());
        let mut acc = RationalSeries::zero(&self.var, n);
        // Horner: acc = c_k + g * acc
        for k in (0..=n).rev() {
            acc = acc.mul(g);
            acc.coeffs[0] += &self.coeffs[k];
        }
        Ok(acc)
    }

    /// Evaluate at a rational point, exactly (truncated tail ignored).
    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0f64;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + rational_to_f64(c);
        }
        acc
    }

    /// Largest absolute coefficient (for diagnostics).
    pub fn max_abs_coeff_f64(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|c| rational_to_f64(c).abs())
            .fold(0.0, f64::max)
    }
}

/// Convert a BigRational to f64 with controlled scaling.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    let num = r.numer();
    let den = r.denom();
    let nb = num.bits() as i64;
    let db = den.bits() as i64;
    // shift both to ~80 bits before the division to avoid overflow
    let shift_n = (nb - 80).max(0);
    let shift_d = (db - 80).max(0);
    let n: BigInt = num >> shift_n as u64;
    let d: BigInt = den >> shift_d as u64;
    let nf = bigint_to_f64(&n);
    let df = bigint_to_f64(&d);
    (nf / df) * 2f64.powi((shift_n - shift_d) as i32)
}

fn bigint_to_f64(n: &BigInt) -> f64 {
    let (sign, digits) = n.to_u64_digits();
    let mut v = 0.0f64;
    for &d in digits.iter().rev() {
        v = v * 1.8446744073709552e19 + d as f64;
    }
    if sign == num_bigint::Sign::Minus {
        -v
    } else {
        v
    }
}

/// Binomial coefficient `binom(alpha, n)` for rational alpha.
pub fn binom_rational(alpha: &BigRational, n: usize) -> BigRational {
    let mut acc = BigRational::one();
    for k in 0..n {
        let factor = (alpha - BigRational::from(BigInt::from(k)))
            / BigRational::from(BigInt::from(k as i64 + 1));
        acc *= factor;
    }
    acc
}

/// The binomial series `(1 + s x)^alpha` to the given order (s = ±1).
pub fn binomial_series(var: &str, alpha: &BigRational, s: i64, order: usize) -> RationalSeries {
    let mut coeffs = Vec::with_capacity(order + 1);
    let mut c = BigRational::one();
    coeffs.push(c.clone());
    for n in 0..order {
        // binom(alpha, n+1) = binom(alpha, n) * (alpha - n)/(n+1)
        let factor = (alpha - BigRational::from(BigInt::from(n)))
            / BigRational::from(BigInt::from(n as i64 + 1));
        c *= factor;
        let signed = if s < 0 && (n + 1) % 2 == 1 {
            -c.clone()
        } else {
            c.clone()
        };
        coeffs.push(signed);
    }
    RationalSeries::from_coeffs(var, coeffs)
}

/// Pochhammer symbol (a)_n for rational a.
pub fn pochhammer(a: &BigRational, n: usize) -> BigRational {
    let mut acc = BigRational::one();
    for k in 0..n {
        acc *= a + BigRational::from(BigInt::from(k));
    }
    acc
}

/// n! as a BigRational.
pub fn factorial(n: usize) -> BigRational {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    BigRational::from(acc)
}

/// ln(1 + s x) as a rational series (s = ±1).
pub fn log1p_series(var: &str, s: i64, order: usize) -> RationalSeries {
    let mut coeffs = vec![BigRational::zero()];
    for n in 1..=order {
        let sign = if s < 0 {
            -BigRational::one()
        } else if n % 2 == 0 {
            -BigRational::one()
        } else {
            BigRational::one()
        };
        coeffs.push(sign / BigRational::from(BigInt::from(n)));
    }
    // for s = -1: ln(1-x) = -sum x^n/n (all negative); for s = +1 alternating
    RationalSeries::from_coeffs(var, coeffs)
}

/// Verify |series(x) - f64 reference| over sample points (test helper).
pub fn assert_series_matches<F: Fn(f64) -> f64>(s: &RationalSeries, f: F, xs: &[f64], tol: f64) {
    for &x in xs {
        let got = s.eval_f64(x);
        let want = f(x);
        assert!(
            (got - want).abs() <= tol * want.abs().max(1.0),
            "series mismatch at {x}: {got} vs {want}"
        );
    }
}

impl std::fmt::Display for RationalSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (n, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            } else {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            }
            let a = c.abs();
            if n == 0 {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{}^{n}", self.var)?;
            } else {
                write!(f, "{a}*{}^{n}", self.var)?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O({}^{})", self.var, self.order() + 1)
    }
}
