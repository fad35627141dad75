//! Polynomial root finding: Aberth-Ehrlich simultaneous iteration in f64,
//! with an optional dyadic-precision polishing pass on exact coefficients.

use super::dyadic::{Dyadic, DyadicComplex};
use crate::error::Error;
use crate::Result;
use num_complex::Complex64;

/// All roots of `p(z) = sum c_k z^k` (coefficients ascending, c_deg != 0).
///
/// Returns roots in deterministic order (sorted by argument, then modulus).
pub fn aberth_f64(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let deg = coeffs.len() - 1;
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[deg];
    if lead.norm() == 0.0 {
        return Err(Error::domain("leading coefficient is zero".to_string()));
    }
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    let dpoly: Vec<Complex64> = (1..=deg).map(|k| monic[k] * k as f64).collect();

    // Initial guesses on a circle of the root-magnitude scale, with an
    // irrational angular offset so symmetric polynomials do not stall.
    let scale = monic[..deg]
        .iter()
        .enumerate()
        .map(|(k, c)| c.norm().powf(1.0 / (deg - k) as f64))
        .fold(0.0f64, f64::max)
        .max(1e-12);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|i| {
            let ang = 2.0 * std::f64::consts::PI * (i as f64 + 0.354) / deg as f64 + 0.618;
            scale * 1.1 * Complex64::new(ang.cos(), ang.sin())
        })
        .collect();

    let eval = |p: &[Complex64], x: Complex64| {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in p.iter().rev() {
            acc = acc * x + c;
        }
        acc
    };

    let mut converged = vec![false; deg];
    for _ in 0..500 {
        let mut all_done = true;
        for i in 0..deg {
            if converged[i] {
                continue;
            }
            let p = eval(&monic, z[i]);
            let dp = eval(&dpoly, z[i]);
            let newton = if dp.norm() > 0.0 {
                p / dp
            } else {
                Complex64::new(1e-12, 1e-12)
            };
            let mut sum = Complex64::new(0.0, 0.0);
            for (j, &zj) in z.iter().enumerate() {
                if j != i {
                    let d = z[i] - zj;
                    if d.norm() > 1e-300 {
                        sum += 1.0 / d;
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - newton * sum;
            let step = if denom.norm() > 1e-300 {
                newton / denom
            } else {
                newton
            };
            z[i] -= step;
            if step.norm() <= 1e-15 * z[i].norm().max(1e-30) {
                converged[i] = true;
            } else {
                all_done = false;
            }
        }
        if all_done {
            break;
        }
    }
    z.sort_by(|a, b| {
        a.arg()
            .total_cmp(&b.arg())
            .then(a.norm().total_cmp(&b.norm()))
    });
    Ok(z)
}

/// Polish f64 root estimates against dyadic coefficients with Aberth steps
/// at full dyadic precision. `coeffs` are ascending, real or complex dyadic.
pub fn aberth_polish_dyadic(
    coeffs: &[DyadicComplex],
    seeds: &[Complex64],
    bits: u32,
    iters: usize,
) -> Vec<DyadicComplex> {
    let deg = coeffs.len() - 1;
    assert_eq!(seeds.len(), deg);
    let dpoly: Vec<DyadicComplex> = (1..=deg)
        .map(|k| {
            let kf = DyadicComplex::from_f64(k as f64, 0.0, bits);
            coeffs[k].mul(&kf)
        })
        .collect();
    let eval = |p: &[DyadicComplex], x: &DyadicComplex| {
        let mut acc = DyadicComplex::zero(bits);
        for c in p.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    };
    let one = DyadicComplex::from_f64(1.0, 0.0, bits);
    let mut z: Vec<DyadicComplex> = seeds
        .iter()
        .map(|s| DyadicComplex::from_f64(s.re, s.im, bits))
        .collect();
    for _ in 0..iters {
        let mut moved = false;
        for i in 0..deg {
            let p = eval(coeffs, &z[i]);
            if p.is_zero() {
                continue;
            }
            let dp = eval(&dpoly, &z[i]);
            if dp.is_zero() {
                continue;
            }
            let newton = p.div(&dp);
            let mut sum = DyadicComplex::zero(bits);
            for (j, zj) in z.iter().enumerate() {
                if j != i {
                    let d = z[i].sub(zj);
                    if !d.is_zero() {
                        sum = sum.add(&one.div(&d));
                    }
                }
            }
            let denom = one.sub(&newton.mul(&sum));
            let step = if denom.is_zero() {
                newton
            } else {
                newton.div(&denom)
            };
            z[i] = z[i].sub(&step);
            if !step.norm_sq().abs_lt_pow2(-2 * (bits as i64 - 16)) {
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
    z
}
