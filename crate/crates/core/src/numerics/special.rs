//! Special functions needed by the physics modules: modified Bessel K0/K1,
//! Bessel J of order ±1/3, the gamma function, Clausen's Cl2, and the zeta
//! constants entering the critical amplitude.

use std::f64::consts::PI;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Gamma function via the Lanczos approximation (g = 7, 9 terms).
///
/// Relative accuracy ~1e-14 on the real line away from the poles.
pub fn gamma_fn(x: f64) -> f64 {
    const G: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // reflection
        PI / ((PI * x).sin() * gamma_fn(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut a = G[0];
        let t = x + 7.5;
        for (i, &g) in G.iter().enumerate().skip(1) {
            a += g / (x + i as f64);
        }
        (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
    }
}

/// Modified Bessel K_nu for nu = 0, 1.
///
/// Ascending series for x <= 2 (mild cancellation only), and a
/// double-exponentially truncated trapezoid on the integral
/// `K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt` for x > 2.
pub fn bessel_k(nu: u32, x: f64) -> f64 {
    assert!(nu <= 1, "only K0 and K1 are implemented");
    assert!(x > 0.0);
    if x <= 2.0 {
        bessel_k_series(nu, x)
    } else {
        bessel_k_integral(nu, x)
    }
}

fn bessel_k_series(nu: u32, x: f64) -> f64 {
    let q = 0.25 * x * x;
    let lx = (0.5 * x).ln();
    if nu == 0 {
        // K0 = -(ln(x/2)+gamma) I0 + sum_{k>=1} q^k/(k!)^2 * H_k
        let mut i0 = 1.0;
        let mut term = 1.0;
        let mut sum = 0.0;
        let mut h = 0.0;
        for k in 1..200 {
            term *= q / ((k * k) as f64);
            h += 1.0 / k as f64;
            i0 += term;
            sum += term * h;
            if term < 1e-18 * i0 {
                break;
            }
        }
        -(lx + EULER_GAMMA) * i0 + sum
    } else {
        // K1 = 1/x + ln(x/2) I1 - (x/4) sum_k (psi(k+1)+psi(k+2)) q^k/(k!(k+1)!)
        let mut i1 = 0.5 * x;
        let mut term = 0.5 * x;
        for k in 1..200 {
            term *= q / ((k * (k + 1)) as f64);
            i1 += term;
            if term < 1e-18 * i1 {
                break;
            }
        }
        let mut sum = 0.0;
        let mut term = 1.0; // q^k / (k!(k+1)!)
        let mut psi_a = -EULER_GAMMA; // psi(k+1)
        let mut psi_b = 1.0 - EULER_GAMMA; // psi(k+2)
        for k in 0..200 {
            let add = (psi_a + psi_b) * term;
            sum += add;
            if add.abs() < 1e-18 * sum.abs().max(1.0) {
                break;
            }
            let kf = (k + 1) as f64;
            term *= q / (kf * (kf + 1.0));
            psi_a += 1.0 / kf;
            psi_b += 1.0 / (kf + 1.0);
        }
        1.0 / x + lx * i1 - 0.25 * x * sum
    }
}

fn bessel_k_integral(nu: u32, x: f64) -> f64 {
    // Truncate where exp(-x cosh t) < 1e-20 * exp(-x).
    let tmax = (1.0 + 46.0 / x).acosh() + 1.0;
    let n = 240;
    let h = tmax / n as f64;
    let mut s = 0.5 * (-x).exp(); // t = 0 endpoint, cosh(0)=1, weight 1/2
    for i in 1..=n {
        let t = i as f64 * h;
        let e = (-x * t.cosh()).exp();
        s += if nu == 0 { e } else { e * t.cosh() };
    }
    // nu=1 integrand at t=0 is exp(-x)*cosh(0) = same endpoint value
    s * h
}

/// Bessel J_nu(x) for nu = ±1/3, by ascending series (x <= 14) or the Hankel
/// asymptotic expansion (x > 14). Both regimes keep >= 1e-10 accuracy on the
/// range used by the spectrum solver (x <= 75).
pub fn bessel_j_third(sign_plus: bool, x: f64) -> f64 {
    let nu: f64 = if sign_plus { 1.0 / 3.0 } else { -1.0 / 3.0 };
    assert!(x > 0.0);
    if x <= 14.0 {
        let q = -0.25 * x * x;
        let mut term = (0.5 * x).powf(nu) / gamma_fn(nu + 1.0);
        let mut sum = term;
        for k in 1..300 {
            term *= q / (k as f64 * (k as f64 + nu));
            sum += term;
            if term.abs() < 1e-19 * sum.abs().max(1e-30) {
                break;
            }
        }
        sum
    } else {
        // Hankel expansion with optimal truncation.
        let omega = x - nu * PI / 2.0 - PI / 4.0;
        let mu = 4.0 * nu * nu;
        let mut p = 1.0;
        let mut q = 0.0;
        let mut term = 1.0;
        let mut k = 0usize;
        let mut prev = f64::INFINITY;
        while k < 40 {
            // a_{k+1} = a_k * (mu - (2k+1)^2) / ((k+1) * 8x)
            let num = mu - ((2 * k + 1) * (2 * k + 1)) as f64;
            term *= num / (((k + 1) as f64) * 8.0 * x);
            if term.abs() > prev {
                break; // divergent tail reached
            }
            prev = term.abs();
            match k % 4 {
                0 => q += term,
                1 => p -= term,
                2 => q -= term,
                _ => p += term,
            }
            k += 1;
        }
        (2.0 / (PI * x)).sqrt() * (omega.cos() * p - omega.sin() * q)
    }
}

/// Clausen's function Cl2(theta) = sum_{n>=1} sin(n theta)/n^2, by direct
/// Kahan-compensated summation of the defining series with a rigorous
/// Dirichlet-kernel tail bound. Returns (value, tail_bound).
pub fn clausen_cl2(theta: f64) -> (f64, f64) {
    let th = theta.rem_euclid(2.0 * PI);
    if th == 0.0 {
        return (0.0, 0.0);
    }
    let n_terms: usize = 2_000_000;
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for n in 1..=n_terms {
        let term = (n as f64 * th).sin() / ((n * n) as f64);
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    // Abel summation: |sum_{n>N} sin(n th)/n^2| <= (1/|sin(th/2)|) * 2/(N+1)^2
    let bound = 2.0 / ((0.5 * th).sin().abs() * ((n_terms + 1) * (n_terms + 1)) as f64);
    (sum, bound)
}

/// zeta(3) by Euler-Maclaurin completion of the defining sum.
pub fn zeta3() -> f64 {
    let n = 200usize;
    let mut s = 0.0;
    for k in 1..n {
        s += 1.0 / (k as f64).powi(3);
    }
    let nf = n as f64;
    // sum_{k>=n} k^-3 = 1/(2n^2) + 1/(2n^3) + 1/(4n^4) - 1/(12 n^6) + ...
    s + 0.5 / nf.powi(2) + 0.5 / nf.powi(3) + 0.25 / nf.powi(4) - 1.0 / (12.0 * nf.powi(6))
}

/// zeta'(2) = -sum ln(n)/n^2, Euler-Maclaurin completed.
fn zeta_prime_2() -> f64 {
    let n = 400usize;
    let mut s = 0.0;
    for k in 2..n {
        let kf = k as f64;
        s += kf.ln() / (kf * kf);
    }
    let nf = n as f64;
    let f = nf.ln() / (nf * nf);
    let fp = (1.0 - 2.0 * nf.ln()) / nf.powi(3);
    let fppp = (26.0 - 24.0 * nf.ln()) / nf.powi(5);
    // int_n^inf ln x / x^2 dx = (ln n + 1)/n
    s += (nf.ln() + 1.0) / nf + 0.5 * f - fp / 12.0 + fppp / 720.0;
    -s
}

/// zeta'(-1) from the functional equation:
/// zeta'(-1) = zeta(-1) * [ln(2 pi) - psi(2) - zeta'(2)/zeta(2)].
pub fn zeta_prime_minus1() -> f64 {
    let psi2 = 1.0 - EULER_GAMMA;
    let zeta2 = PI * PI / 6.0;
    (-1.0 / 12.0) * ((2.0 * PI).ln() - psi2 - zeta_prime_2() / zeta2)
}

/// The critical diagonal amplitude 2^{1/12} exp(3 zeta'(-1)).
pub fn critical_amplitude() -> f64 {
    2f64.powf(1.0 / 12.0) * (3.0 * zeta_prime_minus1()).exp()
}

/// Zeros of the Airy function Ai(-x), x > 0, by integrating y'' = x y from
/// x = 0 with the exact initial data and bracketing sign changes.
///
/// Independent of the Bessel-series route used for the spectrum itself.
pub fn airy_neg_zeros(count: usize) -> Vec<f64> {
    use super::ode::{integrate, OdeOptions};
    if count == 0 {
        return Vec::new();
    }
    // Ai(0) = 3^{-2/3}/Gamma(2/3); in s = -x the slope flips sign:
    // y(s) = Ai(-s) has y'(0) = -Ai'(0) = +3^{-1/3}/Gamma(1/3), y'' = -s y.
    let ai0 = 3f64.powf(-2.0 / 3.0) / gamma_fn(2.0 / 3.0);
    let aip0 = 3f64.powf(-1.0 / 3.0) / gamma_fn(1.0 / 3.0);
    let rhs = |s: f64, y: &[f64], dy: &mut [f64]| {
        dy[0] = y[1];
        dy[1] = -s * y[0];
    };
    // generous upper end: zeros behave like (3 pi (4j-1)/8)^{2/3}
    let smax = (3.0 * PI * (4.0 * count as f64 + 3.0) / 8.0).powf(2.0 / 3.0) + 2.0;
    let mut zeros = Vec::with_capacity(count);
    let mut prev: Option<(f64, f64, f64)> = None; // (s, y, y')
    integrate(
        &rhs,
        0.0,
        &[ai0, aip0],
        smax,
        &OdeOptions {
            rtol: 1e-13,
            atol: 1e-14,
            ..Default::default()
        },
        &mut |s, y: &[f64]| {
            if let Some((s0, y0, _)) = prev {
                if zeros.len() < count && y0 * y[0] <= 0.0 && y0 != 0.0 {
                    // Newton refinement with local Taylor model around s:
                    // use the secant estimate then polish via Hermite data.
                    let mut z = s0 + (s - s0) * y0 / (y0 - y[0]);
                    // cubic Hermite refinement on [s0, s]
                    for _ in 0..50 {
                        let (h, u) = (s - s0, (z - s0) / (s - s0));
                        let h00 = (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u);
                        let h10 = u * (1.0 - u) * (1.0 - u);
                        let h01 = u * u * (3.0 - 2.0 * u);
                        let h11 = u * u * (u - 1.0);
                        let (y0v, d0) = (y0, prev.unwrap().2);
                        let val = h00 * y0v + h10 * h * d0 + h01 * y[0] + h11 * h * y[1];
                        let dh00 = (6.0 * u * u - 6.0 * u) / h;
                        let dh10 = (3.0 * u * u - 4.0 * u + 1.0);
                        let dh01 = (6.0 * u - 6.0 * u * u) / h;
                        let dh11 = (3.0 * u * u - 2.0 * u);
                        let der = dh00 * y0v + dh10 * d0 + dh01 * y[0] + dh11 * y[1];
                        let step = val / der;
                        z -= step;
                        if step.abs() < 1e-14 * z.abs() {
                            break;
                        }
                    }
                    zeros.push(z);
                }
            }
            prev = Some((s, y[0], y[1]));
        },
    )
    .expect("airy integration cannot fail on a finite range");
    zeros.truncate(count);
    zeros
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values computed with 30-digit arithmetic (mpmath).
    #[test]
    fn bessel_k_reference_values() {
        let cases = [
            (0u32, 0.5, 0.924_419_071_227_665_9),
            (0, 1.0, 0.421_024_438_240_708_33),
            (0, 2.0, 0.113_893_872_749_533_44),
            (0, 4.0, 0.011_159_676_085_853_024),
            (0, 10.0, 1.778_006_231_616_765e-5),
            (0, 24.0, 9.608_818_780_833_116e-12),
            (1, 0.5, 1.656_441_120_003_300_9),
            (1, 1.0, 0.601_907_230_197_234_6),
            (1, 4.0, 0.012_483_498_887_268_431),
            (1, 16.0, 3.607_157_117_528_78e-8),
        ];
        for &(nu, x, want) in &cases {
            let got = bessel_k(nu, x);
            assert!(
                (got - want).abs() <= 1e-13 * want.abs(),
                "K{nu}({x}) = {got:e}, want {want:e}"
            );
        }
    }

    #[test]
    fn bessel_j_third_reference_values() {
        let cases = [
            (true, 1.0, 0.730_876_402_169_448),
            (true, 10.0, -0.186_145_167_048_695_75),
            (true, 30.0, -0.133_340_533_874_261_63),
            (false, 1.0, 0.606_887_505_046_529_3),
            (false, 20.0, 0.112_952_515_881_680_25),
        ];
        for &(plus, x, want) in &cases {
            let got = bessel_j_third(plus, x);
            assert!(
                (got - want).abs() <= 2e-11 * want.abs().max(0.1),
                "J(+-1/3)({x}) = {got}, want {want}"
            );
        }
    }

    #[test]
    fn gamma_reference_values() {
        assert!((gamma_fn(0.5) - PI.sqrt()).abs() < 1e-13);
        assert!((gamma_fn(6.0) - 120.0).abs() < 1e-11);
        assert!((gamma_fn(1.0 / 3.0) - 2.678_938_534_707_747_6).abs() < 1e-13);
        assert!((gamma_fn(5.0 / 6.0) - 1.128_787_029_908_126).abs() < 1e-13);
        assert!((gamma_fn(7.5) - 1_871.254_305_797_788_3).abs() < 1e-10);
    }

    #[test]
    fn clausen_values() {
        let (v, bound) = clausen_cl2(PI / 3.0);
        assert!(bound < 1e-11);
        assert!((v - 1.014_941_606_409_653_6).abs() < 1e-11, "Cl2(pi/3) = {v}");
        let (v1, _) = clausen_cl2(1.0);
        assert!((v1 - 1.013_959_132_360_768_5).abs() < 1e-11);
        let (v0, _) = clausen_cl2(0.0);
        assert_eq!(v0, 0.0);
    }

    #[test]
    fn zeta_constants() {
        assert!((zeta3() - 1.202_056_903_159_594_3).abs() < 1e-14);
        assert!((zeta_prime_2() + 0.937_548_254_315_843_8).abs() < 1e-12);
        assert!((zeta_prime_minus1() + 0.165_421_143_700_450_93).abs() < 1e-12);
        assert!((critical_amplitude() - 0.645_002_448_509_577_1).abs() < 1e-12);
    }

    #[test]
    fn airy_zero_reference_values() {
        let z = airy_neg_zeros(5);
        let want = [
            2.338_107_410_459_767,
            4.087_949_444_130_970_6,
            5.520_559_828_095_551,
            6.786_708_090_071_759,
            7.944_133_587_120_853,
        ];
        for (g, w) in z.iter().zip(want.iter()) {
            assert!((g - w).abs() < 1e-9, "airy zero {g} vs {w}");
        }
    }
}
