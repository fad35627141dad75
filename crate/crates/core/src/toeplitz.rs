//! Two-point correlations as Toeplitz determinants: numeric evaluation at any
//! temperature, exact rational series in the elliptic variable, the critical
//! closed form, and the critical asymptote fit.
//!
//! The determinant entries are the Fourier coefficients `a_n` of the
//! square-root symbol. Below `T_c` both symbol parameters lie in `[0,1)` and
//! the principal branch applies; above `T_c` the second parameter exceeds 1,
//! the symbol winds once, and the continuous branch starts at `S(0) = -1`.
//! All branch handling lives in [`symbol_phase`].

use crate::error::Error;
use crate::model::{Branch, CouplingPoint};
use crate::numerics::dyadic::{pi as dyadic_pi, sqrt2, Dyadic};
use crate::numerics::linalg::{lu_det, principal_minors};
use crate::numerics::quad::adaptive;
use crate::numerics::special::critical_amplitude;
use crate::series::{
    binomial_series, factorial, pochhammer, rat, rational_to_f64, RationalSeries,
};
use crate::Result;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::f64::consts::PI;

/// Which correlation a symbol describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrKind {
    /// `<s_00 s_NN>`: alpha1 = 0, alpha2 = k.
    Diagonal,
    /// `<s_00 s_0N>` (separation along the h-coupling direction).
    Row,
    /// `<s_00 s_N0>` (separation along the v-coupling direction).
    Column,
}

/// Real parameters of the square-root generating function.
#[derive(Debug, Clone, Copy)]
pub struct SymbolParams {
    pub alpha1: f64,
    pub alpha2: f64,
}

impl SymbolParams {
    pub fn from_point(point: &CouplingPoint, kind: CorrKind) -> SymbolParams {
        match kind {
            CorrKind::Diagonal => SymbolParams {
                alpha1: 0.0,
                alpha2: point.k,
            },
            CorrKind::Row => {
                let (kv, kh) = (point.kv(), point.kh());
                SymbolParams {
                    alpha1: (-2.0 * kv).exp() * kh.tanh(),
                    alpha2: (-2.0 * kv).exp() / kh.tanh(),
                }
            }
            CorrKind::Column => {
                let (kv, kh) = (point.kh(), point.kv());
                SymbolParams {
                    alpha1: (-2.0 * kv).exp() * kh.tanh(),
                    alpha2: (-2.0 * kv).exp() / kh.tanh(),
                }
            }
        }
    }
}

/// Phase `psi(theta)` of the unimodular symbol `S = exp(i psi)` on the
/// continuous branch with the physical normalization (`S(0+) = +1` below
/// `T_c`, `-1` above, limit `e^{i pi/2}` at criticality).
pub fn symbol_phase(theta: f64, p: &SymbolParams) -> f64 {
    debug_assert!((0.0..=PI).contains(&theta));
    let psi1 = if p.alpha1 == 0.0 {
        0.0
    } else {
        // arg(1 - a e^{i th}), |a| < 1: principal value is continuous
        (-p.alpha1 * theta.sin()).atan2(1.0 - p.alpha1 * theta.cos())
    };
    let psi2 = if (p.alpha2 - 1.0).abs() < 1e-14 {
        // critical: 1 - e^{i th} = 2 sin(th/2) e^{i(th-pi)/2}
        (theta - PI) / 2.0
    } else if p.alpha2 < 1.0 {
        (-p.alpha2 * theta.sin()).atan2(1.0 - p.alpha2 * theta.cos())
    } else {
        // 1 - a e^{i th} = -e^{i th} (a - e^{-i th}); Re(a - e^{-i th}) > 0
        theta + PI + (theta.sin()).atan2(p.alpha2 - theta.cos())
    };
    psi1 - psi2
}

/// Numeric Fourier coefficient `a_n` of the symbol, by adaptive quadrature of
/// `(1/pi) cos(psi(theta) - n theta)` on `[0, pi]`. Returns (value, error).
pub fn fourier_coefficient_numeric(n: i64, p: &SymbolParams, tol: f64) -> (f64, f64) {
    let f = |theta: f64| (symbol_phase(theta, p) - n as f64 * theta).cos();
    let r = adaptive(f, 0.0, PI, tol * PI, 8000);
    (r.value / PI, r.error / PI)
}

// binom(1/2, j) and binom(-1/2, j) term recurrences, as f64.
fn binom_half_next(b: f64, j: usize) -> f64 {
    b * (0.5 - j as f64) / (j as f64 + 1.0)
}
fn binom_mhalf_next(b: f64, j: usize) -> f64 {
    b * (-0.5 - j as f64) / (j as f64 + 1.0)
}

/// Below-`T_c` reduced entry `g_m(t)`: the Toeplitz matrix `[a_{i-j}]` for the
/// diagonal correlation equals `diag(k^i) [g_{i-j}] diag(k^-j)`, so
/// `D_N = det[g_{i-j}(t)]` with `t = k^2`.
///
/// g_m(t) = (-1)^m sum_j C(1/2,j) C(-1/2,m+j) t^j          (m >= 0)
/// g_{-m}(t) = (-1)^m t^m sum_j C(1/2,j+m) C(-1/2,j) t^j   (m > 0)
pub fn diag_entry_below(m: i64, t: f64) -> f64 {
    let sign = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let mm = m.unsigned_abs() as usize;
    let mut sum = 0.0f64;
    if m >= 0 {
        let mut a = 1.0; // C(1/2, j) t^j
        let mut b = 1.0; // C(-1/2, m+j)
        for i in 0..mm {
            b = binom_mhalf_next(b, i);
        }
        let mut j = 0usize;
        loop {
            let term = a * b;
            sum += term;
            if j > 4 && term.abs() < 1e-18 * sum.abs().max(1e-10) {
                break;
            }
            a = binom_half_next(a, j) * t;
            b = binom_mhalf_next(b, mm + j);
            j += 1;
            if j > 2_000_000 {
                break;
            }
        }
    } else {
        let mut a = 1.0; // C(1/2, m+j)
        for i in 0..mm {
            a = binom_half_next(a, i);
        }
        let mut b = 1.0; // C(-1/2, j) t^j
        let mut j = 0usize;
        loop {
            let term = a * b;
            sum += term;
            if j > 4 && term.abs() < 1e-18 * sum.abs().max(1e-10) {
                break;
            }
            a = binom_half_next(a, mm + j);
            b = binom_mhalf_next(b, j) * t;
            j += 1;
            if j > 2_000_000 {
                break;
            }
        }
        sum *= t.powi(mm as i32);
    }
    sign * sum
}

/// Above-`T_c` entry `a_m` for the diagonal correlation, with `u = sqrt(t)`:
///
/// a_n    = (-1)^n u^{n+1} sum_l C(1/2,l+n+1) C(-1/2,l) t^l   (n >= 0)
/// a_{-n} = (-1)^n u^{n-1} sum_j C(1/2,j) C(-1/2,j+n-1) t^j   (n >= 1)
pub fn diag_entry_above(m: i64, t: f64) -> f64 {
    let u = t.sqrt();
    if m >= 0 {
        let n = m as usize;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let mut a = 1.0; // C(1/2, l+n+1)
        for i in 0..=n {
            a = binom_half_next(a, i);
        }
        let mut b = 1.0; // C(-1/2, l) t^l
        let mut sum = 0.0;
        let mut l = 0usize;
        loop {
            let term = a * b;
            sum += term;
            if l > 4 && term.abs() < 1e-18 * sum.abs().max(1e-10) {
                break;
            }
            a = binom_half_next(a, n + 1 + l);
            b = binom_mhalf_next(b, l) * t;
            l += 1;
            if l > 2_000_000 {
                break;
            }
        }
        sign * u.powi(n as i32 + 1) * sum
    } else {
        let n = (-m) as usize;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let mut a = 1.0; // C(1/2, j) t^j
        let mut b = 1.0; // C(-1/2, j+n-1)
        for i in 0..n - 1 {
            b = binom_mhalf_next(b, i);
        }
        let mut sum = 0.0;
        let mut j = 0usize;
        loop {
            let term = a * b;
            sum += term;
            if j > 4 && term.abs() < 1e-18 * sum.abs().max(1e-10) {
                break;
            }
            a = binom_half_next(a, j) * t;
            b = binom_mhalf_next(b, j + n - 1);
            j += 1;
            if j > 2_000_000 {
                break;
            }
        }
        sign * u.powi(n as i32 - 1) * sum
    }
}

/// Hard cap for numeric determinants.
pub const MAX_N_NUMERIC: usize = 64;
/// Hard cap for exact-series determinants.
pub const MAX_N_SERIES: usize = 12;

/// Numeric `D_N = det[a_{i-j}]` from an entry generator.
pub fn toeplitz_det_numeric<F: Fn(i64) -> f64>(n: usize, entry: F) -> Result<f64> {
    if n == 0 {
        return Ok(1.0);
    }
    if n > MAX_N_NUMERIC {
        return Err(Error::capacity(format!(
            "numeric Toeplitz determinant capped at N = {MAX_N_NUMERIC}, got {n}"
        )));
    }
    let cache: Vec<f64> = (-(n as i64 - 1)..=(n as i64 - 1)).map(&entry).collect();
    let at = |m: i64| cache[(m + n as i64 - 1) as usize];
    let mut mat: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| at(i as i64 - j as i64)).collect())
        .collect();
    let (det, _min_piv) = lu_det(&mut mat);
    Ok(det)
}

/// Diagonal correlation `<s_00 s_NN>` at a coupling point, numerically.
///
/// Uses the exact-series entries (hypergeometric sums) with the determinant
/// by LU. At `T_c` the closed form applies.
pub fn diagonal_correlation(point: &CouplingPoint, n: usize) -> Result<f64> {
    match point.branch {
        Branch::AtTc => Ok(diagonal_at_tc(n)),
        Branch::BelowTc => {
            let t = point.t;
            toeplitz_det_numeric(n, |m| diag_entry_below(m, t))
        }
        Branch::AboveTc => {
            let t = point.t;
            toeplitz_det_numeric(n, |m| diag_entry_above(m, t))
        }
    }
}

/// All diagonal correlations `C(N,N)` for `N = 0..=n_max` at once, via a
/// single elimination sweep over leading principal minors.
pub fn diagonal_correlation_sweep(t: f64, branch: Branch, n_max: usize) -> Result<Vec<f64>> {
    if n_max > 512 {
        return Err(Error::capacity(format!(
            "principal-minor sweep capped at 512, got {n_max}"
        )));
    }
    if n_max == 0 {
        return Ok(vec![1.0]);
    }
    let n = n_max;
    let entry: Box<dyn Fn(i64) -> f64> = match branch {
        Branch::BelowTc => Box::new(move |m| diag_entry_below(m, t)),
        Branch::AboveTc => Box::new(move |m| diag_entry_above(m, t)),
        Branch::AtTc => Box::new(move |m| 2.0 / (PI * (2 * m + 1) as f64)),
    };
    let cache: Vec<f64> = (-(n as i64 - 1)..=(n as i64 - 1)).map(&entry).collect();
    let at = |m: i64| cache[(m + n as i64 - 1) as usize];
    let mut mat: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| at(i as i64 - j as i64)).collect())
        .collect();
    let minors = principal_minors(&mut mat);
    let mut out = vec![1.0];
    out.extend(minors);
    Ok(out)
}

/// Row correlation `<s_00 s_0N>` (or column) at a coupling point, by
/// quadrature entries and LU.
pub fn axis_correlation(point: &CouplingPoint, kind: CorrKind, n: usize) -> Result<f64> {
    let p = SymbolParams::from_point(point, kind);
    toeplitz_det_numeric(n, |m| fourier_coefficient_numeric(m, &p, 1e-13).0)
}

/// Exact closed form of the critical diagonal correlation:
/// `(2/pi)^N prod_{j=1}^{N-1} (1 - 1/(4 j^2))^{j-N}`.
pub fn diagonal_at_tc(n: usize) -> f64 {
    let mut v = (2.0 / PI).powi(n as i32);
    for j in 1..n {
        let base = 1.0 - 1.0 / (4.0 * (j * j) as f64);
        v *= base.powi(j as i32 - n as i32);
    }
    v
}

/// Dyadic-precision version of [`diagonal_at_tc`] (used as exact Hirota
/// boundary data).
pub fn diagonal_at_tc_dyadic(n: usize, bits: u32) -> Dyadic {
    let pi = dyadic_pi(bits);
    let two = Dyadic::from_i64(2, bits);
    let mut v = (&two / &pi).powi(n as u32);
    for j in 1..n {
        let fj = Dyadic::from_i64((4 * j * j) as i64 - 1, bits);
        let dj = Dyadic::from_i64((4 * j * j) as i64, bits);
        let base = &fj / &dj;
        let inv = base.powi((n - j) as u32);
        v = &v / &inv;
    }
    v
}

/// Critical row coefficients `a_n` from the exact expansion in
/// `alpha1 = 3 - 2 sqrt(2)`:
///
/// a_n = (2/pi) sum_m beta_m / (1 + 2(n - m)),
/// beta_m = sum_{j1-j2=m} C(1/2,j1) C(-1/2,j2) (-alpha1)^{j1+j2}.
///
/// Only +,-,*,/ and sqrt appear, so the same code evaluates in dyadic
/// precision for the Hirota boundary.
pub struct CriticalRowEntries {
    beta: Vec<Dyadic>, // index m + off
    off: i64,
    two_over_pi: Dyadic,
    bits: u32,
}

impl CriticalRowEntries {
    pub fn new(bits: u32) -> Self {
        let s2 = sqrt2(bits);
        let three = Dyadic::from_i64(3, bits);
        let two = Dyadic::from_i64(2, bits);
        let alpha1 = &three - &(&two * &s2);
        let neg_alpha1 = &Dyadic::zero(bits) - &alpha1;
        // alpha1 ~ 0.1716 decays 2.54 bits per power
        let jmax = ((bits as f64 + 24.0) / 2.54).ceil() as usize + 4;
        let one = Dyadic::from_i64(1, bits);
        let mut a = Vec::with_capacity(jmax + 1); // C(1/2,j) (-alpha1)^j
        let mut b = Vec::with_capacity(jmax + 1); // C(-1/2,j) (-alpha1)^j
        a.push(one.clone());
        b.push(one);
        for j in 0..jmax {
            let den = Dyadic::from_i64(2 * (j as i64 + 1), bits);
            let fa = &Dyadic::from_i64(1 - 2 * j as i64, bits) / &den;
            let na = &(&a[j] * &fa) * &neg_alpha1;
            a.push(na);
            let fb = &Dyadic::from_i64(-1 - 2 * j as i64, bits) / &den;
            let nb = &(&b[j] * &fb) * &neg_alpha1;
            b.push(nb);
        }
        let off = jmax as i64;
        let mut beta = vec![Dyadic::zero(bits); 2 * jmax + 1];
        for (j1, aj) in a.iter().enumerate() {
            for (j2, bj) in b.iter().enumerate() {
                let idx = (j1 as i64 - j2 as i64 + off) as usize;
                beta[idx] = &beta[idx] + &(aj * bj);
            }
        }
        let pi = dyadic_pi(bits);
        let two_over_pi = &Dyadic::from_i64(2, bits) / &pi;
        CriticalRowEntries {
            beta,
            off,
            two_over_pi,
            bits,
        }
    }

    pub fn a_n(&self, n: i64) -> Dyadic {
        let mut s = Dyadic::zero(self.bits);
        for (idx, bm) in self.beta.iter().enumerate() {
            let m = idx as i64 - self.off;
            let den = Dyadic::from_i64(1 + 2 * (n - m), self.bits);
            s = &s + &(bm / &den);
        }
        &s * &self.two_over_pi
    }

    pub fn a_n_f64(&self, n: i64) -> f64 {
        self.a_n(n).to_f64()
    }
}

/// Critical row correlation `<s_00 s_0N>` at `T_c` in dyadic precision.
pub fn row_at_tc_dyadic(n: usize, entries: &CriticalRowEntries, bits: u32) -> Dyadic {
    if n == 0 {
        return Dyadic::from_i64(1, bits);
    }
    let mut mat: Vec<Vec<Dyadic>> = (0..n)
        .map(|i| (0..n).map(|j| entries.a_n(i as i64 - j as i64)).collect())
        .collect();
    let mut det = Dyadic::from_i64(1, bits);
    for col in 0..n {
        let piv = mat[col][col].clone();
        det = &det * &piv;
        for r in col + 1..n {
            let f = &mat[r][col] / &piv;
            if !f.is_zero() {
                for c in col..n {
                    let sub = &f * &mat[col][c];
                    mat[r][c] = &mat[r][c] - &sub;
                }
            }
        }
    }
    det
}

// ---------------------------------------------------------------------------
// Exact rational series
// ---------------------------------------------------------------------------

fn binom_rat_next(b: &BigRational, half: bool, j: usize) -> BigRational {
    let a = if half { rat(1, 2) } else { rat(-1, 2) };
    b * (a - BigRational::from(BigInt::from(j))) / BigRational::from(BigInt::from(j as i64 + 1))
}

/// Exact series for the below-`T_c` reduced entry `g_m(t)` through `t^order`.
pub fn diag_entry_series_below(m: i64, order: usize) -> RationalSeries {
    let mm = m.unsigned_abs() as usize;
    let mut coeffs = vec![BigRational::zero(); order + 1];
    if m >= 0 {
        let mut a = BigRational::one();
        let mut b = BigRational::one();
        for i in 0..mm {
            b = binom_rat_next(&b, false, i);
        }
        for j in 0..=order {
            coeffs[j] = &a * &b;
            a = binom_rat_next(&a, true, j);
            b = binom_rat_next(&b, false, mm + j);
        }
    } else {
        let mut a = BigRational::one();
        for i in 0..mm {
            a = binom_rat_next(&a, true, i);
        }
        let mut b = BigRational::one();
        let mut j = 0usize;
        while mm + j <= order {
            coeffs[mm + j] = &a * &b;
            a = binom_rat_next(&a, true, mm + j);
            b = binom_rat_next(&b, false, j);
            j += 1;
        }
    }
    let s = RationalSeries::from_coeffs("t", coeffs);
    if mm % 2 == 1 {
        s.neg()
    } else {
        s
    }
}

/// Exact series for the above-`T_c` entry `a_m` in the variable `u = sqrt(t)`
/// through `u^order` (coefficients indexed by powers of u).
pub fn diag_entry_series_above(m: i64, order: usize) -> RationalSeries {
    let mut coeffs = vec![BigRational::zero(); order + 1];
    if m >= 0 {
        let n = m as usize;
        let mut a = BigRational::one();
        for i in 0..=n {
            a = binom_rat_next(&a, true, i);
        }
        let mut b = BigRational::one();
        let mut l = 0usize;
        while n + 1 + 2 * l <= order {
            coeffs[n + 1 + 2 * l] = &a * &b;
            a = binom_rat_next(&a, true, n + 1 + l);
            b = binom_rat_next(&b, false, l);
            l += 1;
        }
    } else {
        let n = (-m) as usize;
        let mut a = BigRational::one();
        let mut b = BigRational::one();
        for i in 0..n - 1 {
            b = binom_rat_next(&b, false, i);
        }
        let mut j = 0usize;
        while n - 1 + 2 * j <= order {
            coeffs[n - 1 + 2 * j] = &a * &b;
            a = binom_rat_next(&a, true, j);
            b = binom_rat_next(&b, false, j + n - 1);
            j += 1;
        }
    }
    let s = RationalSeries::from_coeffs("u", coeffs);
    if (m.unsigned_abs() as usize) % 2 == 1 {
        s.neg()
    } else {
        s
    }
}

/// Determinant of the N x N Toeplitz matrix of series entries by memoized
/// Laplace expansion over column subsets.
fn series_det(entries: &dyn Fn(i64) -> RationalSeries, n: usize, order: usize, var: &str) -> RationalSeries {
    if n == 0 {
        return RationalSeries::one(var, order);
    }
    let cache: Vec<RationalSeries> = (-(n as i64 - 1)..=(n as i64 - 1)).map(entries).collect();
    let mut memo: Vec<Option<RationalSeries>> = vec![None; 1 << n];

    struct Ctx<'a> {
        cache: &'a [RationalSeries],
        n: usize,
        order: usize,
        var: &'a str,
    }
    fn rec(ctx: &Ctx, mask: u32, row: usize, memo: &mut Vec<Option<RationalSeries>>) -> RationalSeries {
        if mask == 0 {
            return RationalSeries::one(ctx.var, ctx.order);
        }
        if let Some(s) = &memo[mask as usize] {
            return s.clone();
        }
        let mut acc = RationalSeries::zero(ctx.var, ctx.order);
        let mut sign_pos = true;
        for col in 0..ctx.n {
            if mask & (1 << col) == 0 {
                continue;
            }
            let entry = &ctx.cache[(row as i64 - col as i64 + ctx.n as i64 - 1) as usize];
            if !entry.is_zero() {
                let sub = rec(ctx, mask & !(1 << col), row + 1, memo);
                let term = entry.mul(&sub);
                acc = if sign_pos { acc.add(&term) } else { acc.sub(&term) };
            }
            sign_pos = !sign_pos;
        }
        memo[mask as usize] = Some(acc.clone());
        acc
    }

    let ctx = Ctx {
        cache: &cache,
        n,
        order,
        var,
    };
    let full_mask: u32 = (1 << n) - 1;
    rec(&ctx, full_mask, 0, &mut memo)
}

/// Exact series for the diagonal correlation below `T_c`:
/// `C(N,N) = D_N(t)` as a `t`-series.
pub fn diagonal_series_below(n: usize, order: usize) -> Result<RationalSeries> {
    if n > MAX_N_SERIES {
        return Err(Error::capacity(format!(
            "series determinant capped at N = {MAX_N_SERIES}, got {n}"
        )));
    }
    Ok(series_det(
        &|m| diag_entry_series_below(m, order),
        n,
        order,
        "t",
    ))
}

/// Exact series for the diagonal correlation above `T_c`, returned as the
/// `t`-series `B(t)` with `C(N,N) = t^{N/2} B(t)`.
pub fn diagonal_series_above(n: usize, order_t: usize) -> Result<RationalSeries> {
    if n > MAX_N_SERIES {
        return Err(Error::capacity(format!(
            "series determinant capped at N = {MAX_N_SERIES}, got {n}"
        )));
    }
    if n == 0 {
        return Ok(RationalSeries::one("t", order_t));
    }
    let order_u = 2 * order_t + n;
    let d = series_det(&|m| diag_entry_series_above(m, order_u), n, order_u, "u");
    match d.valuation() {
        Some(v) if v == n => {}
        v => {
            return Err(Error::numeric(format!(
                "series determinant valuation {v:?}, expected {n}"
            )))
        }
    }
    // odd-offset coefficients must vanish identically
    for p in n..=d.order() {
        if (p - n) % 2 == 1 && !d.coeff(p).is_zero() {
            return Err(Error::numeric(format!(
                "series determinant parity violation at u^{p}"
            )));
        }
    }
    let mut coeffs = Vec::with_capacity(order_t + 1);
    for p in 0..=order_t {
        coeffs.push(d.coeff(n + 2 * p));
    }
    Ok(RationalSeries::from_coeffs("t", coeffs))
}

// ---------------------------------------------------------------------------
// Critical asymptote and boundary-series checks
// ---------------------------------------------------------------------------

/// Result of fitting `C(N,N) N^{1/4} = A (1 + c2/N^2 + c4/N^4)`.
#[derive(Debug, Clone)]
pub struct AsymptoteFit {
    pub a_c_fit: f64,
    pub a_c_target: f64,
    pub correction: f64, // c2, to compare against -1/64
    pub n_lo: usize,
    pub n_hi: usize,
}

/// Fit the critical amplitude from the exact closed-form values up to
/// `n_max`; the fit window is the top quarter of the range.
pub fn critical_asymptote_check(n_max: usize) -> Result<AsymptoteFit> {
    if n_max < 12 {
        return Err(Error::domain("need n_max >= 12 for the asymptote fit".to_string()));
    }
    let lo = (3 * n_max) / 4;
    let mut rows = Vec::new();
    let mut ys = Vec::new();
    for n in lo..=n_max {
        let nf = n as f64;
        rows.push(vec![1.0, 1.0 / (nf * nf), 1.0 / nf.powi(4)]);
        ys.push(diagonal_at_tc(n) * nf.powf(0.25));
    }
    let c = crate::numerics::linalg::least_squares(&rows, &ys);
    Ok(AsymptoteFit {
        a_c_fit: c[0],
        a_c_target: critical_amplitude(),
        correction: c[1] / c[0],
        n_lo: lo,
        n_hi: n_max,
    })
}

/// Outcome of the exact boundary-series comparison for `C(N,N)`.
#[derive(Debug, Clone)]
pub struct BoundaryCheck {
    /// Residual after subtracting the predicted leading behavior.
    pub residual: RationalSeries,
    /// Order through which the residual vanishes (verified).
    pub checked_through: usize,
}

/// Low-temperature boundary check: the bracket `C(N,N) (1-t)^{-1/4}` must be
/// `1 + t^{N+1}/(2N+1) ((1/2)_{N+1}/(N+1)!)^2 + O(t^{N+2})`.
///
/// (The usual printed form of this series carries a sign slip on the
/// `t^{N+1}` term; the plus sign is forced by the N=0 case, where the bracket
/// is `(1-t)^{-1/4}`, and by the elliptic closed form of `C(1,1)` — see the
/// module tests.)
pub fn formfactor_boundary_low_t(n: usize, order: usize) -> Result<BoundaryCheck> {
    if order < n + 2 {
        return Err(Error::domain(format!(
            "boundary check needs order >= N+2 = {}",
            n + 2
        )));
    }
    let c = diagonal_series_below(n, order)?;
    let inv_quarter = binomial_series("t", &rat(-1, 4), -1, order);
    let bracket = c.mul(&inv_quarter);
    let half = rat(1, 2);
    let amp = pochhammer(&half, n + 1) / factorial(n + 1);
    let amp2 = &amp * &amp / BigRational::from(BigInt::from(2 * n as i64 + 1));
    let mut predicted = RationalSeries::one("t", order);
    predicted = predicted.add(&RationalSeries::monomial("t", amp2, n + 1, order));
    let residual = bracket.sub(&predicted);
    let checked_through = n + 1;
    for p in 0..=checked_through {
        if !residual.coeff(p).is_zero() {
            return Err(Error::numeric(format!(
                "low-T boundary series mismatch at t^{p}: residual coefficient {}",
                residual.coeff(p)
            )));
        }
    }
    Ok(BoundaryCheck {
        residual,
        checked_through,
    })
}

/// High-temperature boundary check: `C(N,N) = t^{N/2} ((1/2)_N/N! + O(t))`.
pub fn formfactor_boundary_high_t(n: usize, order: usize) -> Result<BoundaryCheck> {
    let b = diagonal_series_above(n, order)?;
    let lead = pochhammer(&rat(1, 2), n) / factorial(n);
    if b.coeff(0) != lead {
        return Err(Error::numeric(format!(
            "high-T boundary series mismatch at t^0: {} vs {}",
            b.coeff(0),
            lead
        )));
    }
    let residual = b.sub(&RationalSeries::monomial("t", lead, 0, b.order()));
    Ok(BoundaryCheck {
        residual,
        checked_through: 0,
    })
}

// ---------------------------------------------------------------------------
// High-precision determinants (N > 32) at rational t
// ---------------------------------------------------------------------------

/// Diagonal correlation below `T_c` at exact rational `t`, evaluated in
/// dyadic precision. Entry series are summed to a rigorous geometric cutoff;
/// the determinant is an LU sweep in dyadic arithmetic.
pub fn diagonal_correlation_hp(n: usize, t: &BigRational, bits: u32) -> Result<Dyadic> {
    if !(t > &BigRational::zero() && t < &BigRational::one()) {
        return Err(Error::domain("rational t must lie in (0,1)".to_string()));
    }
    if n == 0 {
        return Ok(Dyadic::from_i64(1, bits));
    }
    let tf = rational_to_f64(t);
    let jmax = (((bits as f64 + 24.0) * 2f64.ln()) / -tf.ln()).ceil() as usize + 8;
    let entry = |m: i64| -> Dyadic {
        let s = diag_entry_series_below(m, jmax);
        dyadic_eval_rational_series(&s, t, bits)
    };
    let cache: Vec<Dyadic> = (-(n as i64 - 1)..=(n as i64 - 1)).map(entry).collect();
    let at = |m: i64| cache[(m + n as i64 - 1) as usize].clone();
    let mut mat: Vec<Vec<Dyadic>> = (0..n)
        .map(|i| (0..n).map(|j| at(i as i64 - j as i64)).collect())
        .collect();
    let mut det = Dyadic::from_i64(1, bits);
    for col in 0..n {
        let piv = mat[col][col].clone();
        if piv.is_zero() {
            return Err(Error::numeric("zero pivot in dyadic Toeplitz LU".to_string()));
        }
        det = &det * &piv;
        for r in col + 1..n {
            let f = &mat[r][col] / &piv;
            if !f.is_zero() {
                for c in col..n {
                    let sub = &f * &mat[col][c];
                    mat[r][c] = &mat[r][c] - &sub;
                }
            }
        }
    }
    Ok(det)
}

fn dyadic_eval_rational_series(s: &RationalSeries, x: &BigRational, bits: u32) -> Dyadic {
    let xd = &Dyadic::from_bigint(x.numer().clone(), bits)
        / &Dyadic::from_bigint(x.denom().clone(), bits);
    let mut acc = Dyadic::zero(bits);
    for c in s.coeffs().iter().rev() {
        let cd = &Dyadic::from_bigint(c.numer().clone(), bits)
            / &Dyadic::from_bigint(c.denom().clone(), bits);
        acc = &(&acc * &xd) + &cd;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CouplingPoint;

    #[test]
    fn trivial_symbol_is_identity() {
        let p = SymbolParams {
            alpha1: 0.0,
            alpha2: 0.0,
        };
        let (a0, _) = fourier_coefficient_numeric(0, &p, 1e-13);
        assert!((a0 - 1.0).abs() < 1e-12);
        for n in [-3i64, -1, 1, 2, 5] {
            let (an, _) = fourier_coefficient_numeric(n, &p, 1e-13);
            assert!(an.abs() < 1e-12, "a_{n} = {an}");
        }
    }

    #[test]
    fn diagonal_series_vs_quadrature_below() {
        // spec pair: exact expander vs quadrature at alpha2 = 0.1 (t = 0.01)
        let t = 0.01f64;
        let p = SymbolParams {
            alpha1: 0.0,
            alpha2: 0.1,
        };
        let (a0q, _) = fourier_coefficient_numeric(0, &p, 1e-14);
        let a0s = diag_entry_below(0, t);
        assert!((a0q - a0s).abs() < 1e-10, "{a0q} vs {a0s}");
        // a_1 and a_-1 carry k^{+-1}
        let (a1q, _) = fourier_coefficient_numeric(1, &p, 1e-14);
        let a1s = 0.1 * diag_entry_below(1, t);
        assert!((a1q - a1s).abs() < 1e-10);
        let (am1q, _) = fourier_coefficient_numeric(-1, &p, 1e-14);
        let am1s = (1.0 / 0.1) * diag_entry_below(-1, t);
        assert!((am1q - am1s).abs() < 1e-10, "{am1q} vs {am1s}");
    }

    #[test]
    fn diagonal_series_vs_quadrature_above() {
        let u = 0.4f64;
        let t = u * u;
        let p = SymbolParams {
            alpha1: 0.0,
            alpha2: 1.0 / u,
        };
        for n in [-2i64, -1, 0, 1, 2] {
            let (aq, _) = fourier_coefficient_numeric(n, &p, 1e-14);
            let as_ = diag_entry_above(n, t);
            assert!((aq - as_).abs() < 1e-10, "a_{n}: {aq} vs {as_}");
        }
    }

    #[test]
    fn exact_series_leading_coefficients() {
        // g_0 = 1 - t/4 - 3/64 t^2 - 5/256 t^3 ... (the (2/pi)E(k) series)
        let s = diag_entry_series_below(0, 4);
        assert_eq!(s.coeff(0), rat(1, 1));
        assert_eq!(s.coeff(1), rat(-1, 4));
        assert_eq!(s.coeff(2), rat(-3, 64));
        assert_eq!(s.coeff(3), rat(-5, 256));
    }

    #[test]
    fn one_by_one_determinant_is_a0() {
        let t = 0.2;
        let d1 = toeplitz_det_numeric(1, |m| diag_entry_below(m, t)).unwrap();
        assert_eq!(d1, diag_entry_below(0, t));
        let d0 = toeplitz_det_numeric(0, |m| diag_entry_below(m, t)).unwrap();
        assert_eq!(d0, 1.0);
    }

    #[test]
    fn series_and_numeric_agree_at_quarter() {
        // spec: diagonal N=2 at t = 0.25, numeric vs series to 1e-10
        let t = 0.25f64;
        let d2_num = toeplitz_det_numeric(2, |m| diag_entry_below(m, t)).unwrap();
        let d2_ser = diagonal_series_below(2, 60).unwrap().eval_f64(t);
        assert!((d2_num - d2_ser).abs() < 1e-10, "{d2_num} vs {d2_ser}");
    }

    #[test]
    fn critical_closed_form_values() {
        assert_eq!(diagonal_at_tc(0), 1.0);
        assert!((diagonal_at_tc(1) - 2.0 / PI).abs() < 1e-15);
        let d2 = 16.0 / (3.0 * PI * PI);
        assert!((diagonal_at_tc(2) - d2).abs() < 1e-15);
        let d = diagonal_at_tc_dyadic(5, 240).to_f64();
        assert!((d - diagonal_at_tc(5)).abs() < 1e-14);
    }

    #[test]
    fn critical_diagonal_matches_toeplitz_numeric() {
        for n in [1usize, 2, 3] {
            let dn = toeplitz_det_numeric(n, |m| 2.0 / (PI * (2 * m + 1) as f64)).unwrap();
            assert!(
                (dn - diagonal_at_tc(n)).abs() < 1e-12,
                "N={n}: {dn} vs {}",
                diagonal_at_tc(n)
            );
        }
        let p = SymbolParams {
            alpha1: 0.0,
            alpha2: 1.0,
        };
        for n in [0i64, 1, 2, 5] {
            let (aq, _) = fourier_coefficient_numeric(n, &p, 1e-13);
            let exact = 2.0 / (PI * (2 * n + 1) as f64);
            assert!((aq - exact).abs() < 1e-11, "a_{n}: {aq} vs {exact}");
        }
    }

    #[test]
    fn row_entries_at_tc() {
        let point = CouplingPoint::critical(1.0, 1.0).unwrap();
        let p = SymbolParams::from_point(&point, CorrKind::Row);
        assert!((p.alpha2 - 1.0).abs() < 1e-12);
        assert!((p.alpha1 - (3.0 - 2.0 * 2f64.sqrt())).abs() < 1e-12);
        let entries = CriticalRowEntries::new(220);
        for n in [-2i64, -1, 0, 1, 3] {
            let (aq, _) = fourier_coefficient_numeric(n, &p, 1e-13);
            let ae = entries.a_n_f64(n);
            assert!((aq - ae).abs() < 1e-10, "row a_{n}: {aq} vs {ae}");
        }
        let a0 = entries.a_n_f64(0);
        assert!(
            (a0 - 1.0 / 2f64.sqrt()).abs() < 1e-12,
            "critical nn row correlation {a0}"
        );
    }

    #[test]
    fn asymptote_fit_quick() {
        let fit = critical_asymptote_check(48).unwrap();
        assert!(
            (fit.a_c_fit - fit.a_c_target).abs() < 2e-6,
            "A_c fit {} vs {}",
            fit.a_c_fit,
            fit.a_c_target
        );
        let rel = (fit.correction + 1.0 / 64.0).abs() / (1.0 / 64.0);
        assert!(rel < 0.05, "correction {} vs -1/64", fit.correction);
    }

    #[test]
    fn boundary_checks_small_n() {
        for n in 0..=3 {
            let chk = formfactor_boundary_low_t(n, n + 4).unwrap();
            assert_eq!(chk.checked_through, n + 1);
        }
        for n in 1..=3 {
            formfactor_boundary_high_t(n, 4).unwrap();
        }
        // explicit: N=1 bracket coefficient is +3/64 at t^2
        let c = diagonal_series_below(1, 4).unwrap();
        let bracket = c.mul(&binomial_series("t", &rat(-1, 4), -1, 4));
        assert_eq!(bracket.coeff(2), rat(3, 64));
        // N=2 high-T leading term is (1/2)_2/2! = 3/8
        let b = diagonal_series_above(2, 3).unwrap();
        assert_eq!(b.coeff(0), rat(3, 8));
    }

    #[test]
    fn below_tc_approach_to_m_squared() {
        let k: f64 = 0.5;
        let t = k * k;
        let m2 = (1.0 - t).powf(0.25);
        let c = toeplitz_det_numeric(24, |m| diag_entry_below(m, t)).unwrap();
        assert!((c - m2).abs() < 1e-5, "C(24,24) = {c}, M^2 = {m2}");
        let sweep = diagonal_correlation_sweep(t, Branch::BelowTc, 12).unwrap();
        for w in sweep.windows(2) {
            assert!(w[1] < w[0] && w[1] > 0.0);
        }
    }

    #[test]
    fn hp_determinant_matches_f64() {
        let t_rat = rat(1, 4);
        let hp = diagonal_correlation_hp(6, &t_rat, 200).unwrap().to_f64();
        let f = toeplitz_det_numeric(6, |m| diag_entry_below(m, 0.25)).unwrap();
        assert!((hp - f).abs() < 1e-12, "{hp} vs {f}");
    }

    #[test]
    fn axis_correlation_high_temperature_limit() {
        // T -> inf: nearest-neighbor row correlation ~ tanh(Eh/T)
        let point = CouplingPoint::new(1.0, 1.0, 50.0).unwrap();
        let c = axis_correlation(&point, CorrKind::Row, 1).unwrap();
        let approx = (1.0f64 / 50.0).tanh();
        assert!(
            (c - approx).abs() < 5e-4,
            "row nn correlation {c} vs tanh {approx}"
        );
        assert!(c > approx, "2d corrections increase the correlation");
    }
}
