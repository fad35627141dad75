//! Exact integer q-series: Bose (alternating-sum) and Fermi (quasi-particle
//! sum) forms of minimal-model characters, and the machinery to verify their
//! equality coefficient by coefficient.

use crate::error::Error;
use crate::Result;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// A truncated q-series with exact integer coefficients `c_0..c_K`.
#[derive(Debug, Clone, PartialEq)]
pub struct QSeries {
    coeffs: Vec<BigInt>,
}

impl QSeries {
    pub fn zero(order: usize) -> Self {
        QSeries {
            coeffs: vec![BigInt::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = BigInt::one();
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> BigInt {
        self.coeffs.get(n).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn add_assign(&mut self, other: &QSeries) {
        for (a, b) in self.coeffs.iter_mut().zip(other.coeffs.iter()) {
            *a += b;
        }
    }

    pub fn add(&self, other: &QSeries) -> QSeries {
        let n = self.order().min(other.order());
        QSeries {
            coeffs: (0..=n).map(|i| self.coeff(i) + other.coeff(i)).collect(),
        }
    }

    pub fn mul(&self, other: &QSeries) -> QSeries {
        let n = self.order().min(other.order());
        let mut coeffs = vec![BigInt::zero(); n + 1];
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
        QSeries { coeffs }
    }

    /// Multiply by `1/(1 - q^k)` in place (running prefix sums).
    pub fn mul_geometric(&mut self, k: usize) {
        for i in k..self.coeffs.len() {
            let prev = self.coeffs[i - k].clone();
            self.coeffs[i] += prev;
        }
    }

    /// Multiply by `(1 - q^k)` in place.
    pub fn mul_one_minus(&mut self, k: usize) {
        for i in (k..self.coeffs.len()).rev() {
            let prev = self.coeffs[i - k].clone();
            self.coeffs[i] -= prev;
        }
    }

    /// Multiply by `q^d` (shift up, truncating at the order).
    pub fn shifted(&self, d: usize) -> QSeries {
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len()];
        for i in 0..self.coeffs.len().saturating_sub(d) {
            coeffs[i + d] = self.coeffs[i].clone();
        }
        QSeries { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }
}

/// `1/(q)_m` through `q^order` (`m = usize::MAX` gives `1/(q)_inf`).
pub fn inv_pochhammer(m: usize, order: usize) -> QSeries {
    let mut s = QSeries::one(order);
    let top = m.min(order);
    for k in 1..=top {
        s.mul_geometric(k);
    }
    s
}

/// Euler function `(q)_inf` through `q^order` (pentagonal-number sparse sum).
pub fn euler_function(order: usize) -> QSeries {
    let mut s = QSeries::zero(order);
    s.coeffs[0] = BigInt::one();
    let mut k = 1i64;
    loop {
        let g1 = k * (3 * k - 1) / 2;
        let g2 = k * (3 * k + 1) / 2;
        if g1 as usize > order && g2 as usize > order {
            break;
        }
        let sign = if k % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        if (g1 as usize) <= order {
            s.coeffs[g1 as usize] += &sign;
        }
        if (g2 as usize) <= order {
            s.coeffs[g2 as usize] += &sign;
        }
        k += 1;
    }
    s
}

/// Bose form of the minimal-model character `chi^{(p,p')}_{r,s}`, normalized
/// to constant term 1 (the `q^{h - c/24}` prefactor is omitted throughout):
///
/// `chi = (1/(q)_inf) sum_j [ q^{j(p p' j + r p' - s p)} - q^{(p' j + s)(p j + r)} ]`
pub fn rocha_caridi(p: i64, pp: i64, r: i64, s: i64, order: usize) -> Result<QSeries> {
    if !(1 <= r && r <= p - 1 && 1 <= s && s <= pp - 1) {
        return Err(Error::domain(format!(
            "character labels out of range: r={r} (1..{}), s={s} (1..{})",
            p - 1,
            pp - 1
        )));
    }
    if num_integer::gcd(p, pp) != 1 {
        return Err(Error::domain("p and p' must be coprime".to_string()));
    }
    if order > 2000 {
        return Err(Error::capacity("character order capped at 2000".to_string()));
    }
    let mut numer = QSeries::zero(order);
    let jcap = ((order as f64 / (p * pp) as f64).sqrt() as i64) + 2;
    for j in -jcap..=jcap {
        let a = j * (p * pp * j + r * pp - s * p);
        let b = (pp * j + s) * (p * j + r);
        if a >= 0 && (a as usize) <= order {
            numer.coeffs[a as usize] += BigInt::one();
        }
        if b >= 0 && (b as usize) <= order {
            numer.coeffs[b as usize] -= BigInt::one();
        }
    }
    let inv_euler = inv_pochhammer(usize::MAX, order);
    Ok(numer.mul(&inv_euler))
}

/// Parity selector for the single-quasi-particle spin-character sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Odd,
    Even,
}

/// Fermionic spin character of M(3,4):
/// `sum_{m parity} q^{m(m-1)/2} / (q)_m`.
pub fn fermionic_m34_spin(parity: Parity, order: usize) -> QSeries {
    let mut acc = QSeries::zero(order);
    let mut m = match parity {
        Parity::Even => 0usize,
        Parity::Odd => 1usize,
    };
    while m * (m.max(1) - 1) / 2 <= order {
        let e = m * (m.saturating_sub(1)) / 2;
        let term = inv_pochhammer(m, order).shifted(e);
        acc.add_assign(&term);
        m += 2;
    }
    acc
}

/// The two Rogers-Ramanujan sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RogersRamanujan {
    /// `sum q^{n^2+n}/(q)_n`, the `chi^{(2,5)}_{1,1}` side.
    First,
    /// `sum q^{n^2}/(q)_n`, the `chi^{(2,5)}_{1,2}` side.
    Second,
}

pub fn rogers_ramanujan(which: RogersRamanujan, order: usize) -> QSeries {
    let mut acc = QSeries::zero(order);
    let mut n = 0usize;
    loop {
        let e = match which {
            RogersRamanujan::First => n * n + n,
            RogersRamanujan::Second => n * n,
        };
        if e > order {
            break;
        }
        let term = inv_pochhammer(n, order).shifted(e);
        acc.add_assign(&term);
        n += 1;
    }
    acc
}

/// The E8 Cartan matrix (Bourbaki node ordering: the chain 1-3-4-5-6-7-8
/// with node 2 attached to node 4).
pub fn cartan_e8() -> [[i64; 8]; 8] {
    let mut c = [[0i64; 8]; 8];
    for (i, row) in c.iter_mut().enumerate() {
        row[i] = 2;
    }
    let edges = [(0, 2), (1, 3), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7)];
    for &(a, b) in &edges {
        c[a][b] = -1;
        c[b][a] = -1;
    }
    c
}

/// Exact inverse of the E8 Cartan matrix; the entries are integers because
/// the determinant is 1 (checked).
pub fn cartan_e8_inverse() -> Result<[[i64; 8]; 8]> {
    let c = cartan_e8();
    // Gauss-Jordan over exact rationals
    let mut a: Vec<Vec<BigRational>> = (0..8)
        .map(|i| {
            (0..16)
                .map(|j| {
                    if j < 8 {
                        BigRational::from_integer(c[i][j].into())
                    } else if j - 8 == i {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        })
        .collect();
    let mut det = BigRational::one();
    for col in 0..8 {
        let piv_row = (col..8)
            .find(|&r| !a[r][col].is_zero())
            .ok_or_else(|| Error::numeric("singular Cartan matrix".to_string()))?;
        a.swap(col, piv_row);
        if piv_row != col {
            det = -det;
        }
        let piv = a[col][col].clone();
        det *= &piv;
        for j in 0..16 {
            a[col][j] /= &piv;
        }
        for r in 0..8 {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in 0..16 {
                    let sub = &f * &a[col][j];
                    a[r][j] -= sub;
                }
            }
        }
    }
    if det != BigRational::one() {
        return Err(Error::numeric(format!("det(C_E8) = {det}, expected 1")));
    }
    let mut inv = [[0i64; 8]; 8];
    for i in 0..8 {
        for j in 0..8 {
            let v = &a[i][j + 8];
            if !v.denom().is_one() {
                return Err(Error::numeric("non-integer Cartan inverse entry".to_string()));
            }
            let n = v.numer();
            inv[i][j] = i64::try_from(n).map_err(|_| Error::numeric("inverse overflow".to_string()))?;
            if inv[i][j] <= 0 {
                return Err(Error::numeric(
                    "Cartan inverse must be positive for the pruning bound".to_string(),
                ));
            }
        }
    }
    Ok(inv)
}

/// Restriction applied to the 8-fold fermionic sum (used by the experimental
/// combined-character probes).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum E8Restriction {
    None,
    NodeEven(usize),
    NodeOdd(usize),
}

/// Fermionic E8 character sum
/// `sum_{m in Z_{>=0}^8} q^{m C^{-1} m^t} / prod_i (q)_{m_i}`.
///
/// The positive inverse-Cartan entries make the exponent monotone in every
/// coordinate, so the depth-first enumeration prunes exactly.
pub fn fermionic_e8(order: usize) -> Result<QSeries> {
    fermionic_e8_restricted(order, E8Restriction::None)
}

pub const MAX_E8_ORDER: usize = 60;

pub fn fermionic_e8_restricted(order: usize, restriction: E8Restriction) -> Result<QSeries> {
    if order > MAX_E8_ORDER {
        return Err(Error::capacity(format!(
            "E8 sum capped at order {MAX_E8_ORDER}"
        )));
    }
    let inv = cartan_e8_inverse()?;
    // max single coordinate: A_ii m^2 <= order with A_ii >= 2
    let inv_poch: Vec<QSeries> = (0..=(order as f64).sqrt() as usize + 1)
        .map(|m| inv_pochhammer(m, order))
        .collect();
    let mut acc = QSeries::zero(order);

    // assert on the fly that every exponent is a non-negative integer (it is
    // m C^{-1} m^t with integer entries, but the invariant is cheap to keep)
    fn rec(
        level: usize,
        m: &mut [usize; 8],
        exponent: i64,
        partial: &QSeries,
        inv: &[[i64; 8]; 8],
        inv_poch: &[QSeries],
        order: usize,
        restriction: E8Restriction,
        acc: &mut QSeries,
    ) {
        if level == 8 {
            debug_assert!(exponent >= 0);
            acc.add_assign(partial);
            return;
        }
        let mut ml = 0usize;
        loop {
            // exponent increment: A_ll m^2 + 2 m sum_{i<l} A_il m_i
            let mut cross = 0i64;
            for i in 0..level {
                cross += inv[i][level] * m[i] as i64;
            }
            let delta = inv[level][level] * (ml * ml) as i64 + 2 * ml as i64 * cross;
            let e = exponent + delta;
            if e > order as i64 {
                break;
            }
            let skip = match restriction {
                E8Restriction::None => false,
                E8Restriction::NodeEven(i) => i == level && ml % 2 == 1,
                E8Restriction::NodeOdd(i) => i == level && ml % 2 == 0,
            };
            if !skip {
                m[level] = ml;
                let next = if ml == 0 && delta == 0 {
                    partial.clone()
                } else {
                    partial.mul(&inv_poch[ml]).shifted(delta as usize)
                };
                // the shifted partial already went through (q)_{m_l}; descend
                rec(
                    level + 1,
                    m,
                    e,
                    &next,
                    inv,
                    inv_poch,
                    order,
                    restriction,
                    acc,
                );
                m[level] = 0;
            }
            ml += 1;
        }
    }

    let mut m = [0usize; 8];
    let one = QSeries::one(order);
    rec(
        0,
        &mut m,
        0,
        &one,
        &inv,
        &inv_poch,
        order,
        restriction,
        &mut acc,
    );
    Ok(acc)
}

/// Exact coefficient comparison; `Ok(())` or the first mismatching index.
pub fn verify_identity(a: &QSeries, b: &QSeries) -> std::result::Result<(), usize> {
    let n = a.order().min(b.order());
    for i in 0..=n {
        if a.coeff(i) != b.coeff(i) {
            return Err(i);
        }
    }
    Ok(())
}

/// Outcome of one experimental combined-character probe.
#[derive(Debug, Clone)]
pub struct CombinedProbe {
    pub name: String,
    pub established: bool,
    pub first_mismatch: Option<usize>,
}

/// Experimental verification of the further character combinations the
/// E8 engine can express (the fermionic sides are only cited, not printed,
/// so each candidate is probed and reported rather than asserted).
pub fn experimental_combined_identities(order: usize) -> Result<Vec<CombinedProbe>> {
    let chi11 = rocha_caridi(3, 4, 1, 1, order)?;
    let chi12 = rocha_caridi(3, 4, 1, 2, order)?;
    let chi21 = rocha_caridi(3, 4, 2, 1, order)?;
    let mut probes = Vec::new();
    let mut push = |name: &str, lhs: &QSeries, rhs: &QSeries| {
        let res = verify_identity(lhs, rhs);
        probes.push(CombinedProbe {
            name: name.to_string(),
            established: res.is_ok(),
            first_mismatch: res.err(),
        });
    };
    // node-parity splits of the full E8 sum against single characters and
    // pairwise sums
    let full = fermionic_e8(order)?;
    push("e8-full = chi11", &full, &chi11);
    let sum1112 = chi11.add(&chi12);
    let sum1121 = chi11.add(&chi21);
    for node in 0..8 {
        let even = fermionic_e8_restricted(order, E8Restriction::NodeEven(node))?;
        push(&format!("e8-node{node}-even = chi11+chi12"), &even, &sum1112);
        push(&format!("e8-node{node}-even = chi11+chi21"), &even, &sum1121);
    }
    Ok(probes)
}

// --- independent combinatorial oracles (used by tests) ---

/// Number of partitions of `n` into parts differing by at least 2
/// (first Rogers-Ramanujan counting).
pub fn count_partitions_gap2(n: usize) -> u64 {
    fn rec(n: i64, min_part: i64, memo: &mut std::collections::HashMap<(i64, i64), u64>) -> u64 {
        if n == 0 {
            return 1;
        }
        if n < min_part {
            return 0;
        }
        if let Some(&v) = memo.get(&(n, min_part)) {
            return v;
        }
        let mut acc = 0u64;
        let mut p = min_part;
        while p <= n {
            acc += rec(n - p, p + 2, memo);
            p += 1;
        }
        memo.insert((n, min_part), acc);
        acc
    }
    rec(n as i64, 1, &mut Default::default())
}

/// Ordinary partition count p(n) by direct dynamic programming (independent
/// of the pentagonal recurrence inside `inv_pochhammer`).
pub fn count_partitions(n: usize) -> BigInt {
    let mut table = vec![BigInt::zero(); n + 1];
    table[0] = BigInt::one();
    for part in 1..=n {
        for total in part..=n {
            let prev = table[total - part].clone();
            table[total] += prev;
        }
    }
    table[n].clone()
}
