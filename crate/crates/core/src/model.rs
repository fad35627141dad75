//! Coupling/temperature parametrization and the algebraic change-of-variables
//! used by every other module.
//!
//! Units: Boltzmann's constant is absorbed, so temperatures are in units of
//! `E/k_B` and the only combinations that ever enter are `K_i = E_i / T`.

use crate::error::Error;
use crate::Result;

/// Which side of the critical temperature a coupling point sits on.
///
/// `AtTc` is only produced by [`CouplingPoint::critical`]; points built from
/// an arbitrary temperature are classified strictly by `s_v * s_h` vs 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    BelowTc,
    AboveTc,
    AtTc,
}

/// A lattice coupling/temperature state with all derived algebraic variables.
///
/// * `s_v`, `s_h` — `sinh 2E_v/T`, `sinh 2E_h/T`
/// * `k` — `(s_v s_h)^{-1}`, the low-temperature elliptic modulus
/// * `t` — `k^2` below `T_c`, `(s_v s_h)^2` above (both in `(0,1]`)
/// * `tau` — `(1/s - s)/2` for the isotropic case, else `None`
/// * `w` — `1/(2(s + 1/s))` isotropic, else `None`
#[derive(Debug, Clone, Copy)]
pub struct CouplingPoint {
    pub ev: f64,
    pub eh: f64,
    pub temperature: f64,
    pub branch: Branch,
    pub s_v: f64,
    pub s_h: f64,
    pub k: f64,
    pub t: f64,
    pub tau: Option<f64>,
    pub w: Option<f64>,
}

impl CouplingPoint {
    /// Build a coupling point at temperature `t` and derive all variables.
    ///
    /// Errors: non-positive couplings or temperature (the hyperbolic
    /// variables diverge at `T = 0`).
    pub fn new(ev: f64, eh: f64, temperature: f64) -> Result<Self> {
        if !(ev > 0.0) || !(eh > 0.0) {
            return Err(Error::domain(format!(
                "couplings must be positive, got Ev={ev}, Eh={eh}"
            )));
        }
        if !(temperature > 0.0) {
            return Err(Error::domain(format!(
                "temperature must be positive, got T={temperature} (s diverges at T=0)"
            )));
        }
        let s_v = (2.0 * ev / temperature).sinh();
        let s_h = (2.0 * eh / temperature).sinh();
        if !s_v.is_finite() || !s_h.is_finite() {
            return Err(Error::domain(format!(
                "sinh overflow at T={temperature}: temperature too close to the T=0 pole"
            )));
        }
        let prod = s_v * s_h;
        let branch = if prod > 1.0 {
            Branch::BelowTc
        } else {
            Branch::AboveTc
        };
        Ok(Self::with_branch(ev, eh, temperature, branch))
    }

    fn with_branch(ev: f64, eh: f64, temperature: f64, branch: Branch) -> Self {
        let s_v = (2.0 * ev / temperature).sinh();
        let s_h = (2.0 * eh / temperature).sinh();
        let prod = s_v * s_h;
        let k = 1.0 / prod;
        let t = match branch {
            Branch::BelowTc => k * k,
            Branch::AboveTc => prod * prod,
            Branch::AtTc => 1.0,
        };
        let (tau, w) = if (ev - eh).abs() <= 1e-15 * ev.abs() {
            let s = (2.0 * ev / temperature).sinh();
            (Some((1.0 / s - s) / 2.0), Some(1.0 / (2.0 * (s + 1.0 / s))))
        } else {
            (None, None)
        };
        CouplingPoint {
            ev,
            eh,
            temperature,
            branch,
            s_v,
            s_h,
            k,
            t,
            tau,
            w,
        }
    }

    /// The point exactly at the critical temperature of `(Ev, Eh)`.
    pub fn critical(ev: f64, eh: f64) -> Result<Self> {
        let tc = critical_temperature(ev, eh)?;
        Ok(Self::with_branch(ev, eh, tc, Branch::AtTc))
    }

    /// True when the couplings are equal (the isotropic lattice).
    pub fn is_isotropic(&self) -> bool {
        self.tau.is_some()
    }

    /// `K_v = E_v/T` and `K_h = E_h/T`.
    pub fn kv(&self) -> f64 {
        self.ev / self.temperature
    }
    pub fn kh(&self) -> f64 {
        self.eh / self.temperature
    }

    /// The dual point: `sinh 2K*_v = 1/sinh 2K_v`, `sinh 2K*_h = 1/sinh 2K_h`,
    /// realized at the same temperature by replacing the couplings.
    ///
    /// Applying it twice returns the original couplings.
    pub fn dual(&self) -> CouplingPoint {
        let kv_star = 0.5 * (1.0 / self.s_v).asinh();
        let kh_star = 0.5 * (1.0 / self.s_h).asinh();
        let branch = match self.branch {
            Branch::BelowTc => Branch::AboveTc,
            Branch::AboveTc => Branch::BelowTc,
            Branch::AtTc => Branch::AtTc,
        };
        Self::with_branch(
            kv_star * self.temperature,
            kh_star * self.temperature,
            self.temperature,
            branch,
        )
    }
}

/// Solve `sinh(2Ev/T) * sinh(2Eh/T) = 1` for the critical temperature.
///
/// The residual `|s_v s_h - 1|` of the returned point is below 1e-14.
pub fn critical_temperature(ev: f64, eh: f64) -> Result<f64> {
    if !(ev > 0.0) || !(eh > 0.0) {
        return Err(Error::domain(format!(
            "couplings must be positive, got Ev={ev}, Eh={eh}"
        )));
    }
    // Work in beta = 1/T; g(beta) = ln(sinh 2Ev b * sinh 2Eh b) is strictly
    // increasing from -inf to +inf, so bisection + Newton is safe.
    let g = |b: f64| (2.0 * ev * b).sinh().ln() + (2.0 * eh * b).sinh().ln();
    let mut lo = 1e-12;
    let mut hi = 1.0;
    while g(hi) < 0.0 {
        hi *= 2.0;
    }
    while g(lo) > 0.0 {
        lo *= 0.5;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 2.0 * f64::EPSILON * hi {
            break;
        }
    }
    // Newton polish on h(b) = sinh*sinh - 1.
    let mut b = 0.5 * (lo + hi);
    for _ in 0..4 {
        let sv = (2.0 * ev * b).sinh();
        let sh = (2.0 * eh * b).sinh();
        let h = sv * sh - 1.0;
        let dh = 2.0 * ev * (2.0 * ev * b).cosh() * sh + 2.0 * eh * (2.0 * eh * b).cosh() * sv;
        b -= h / dh;
    }
    let tc = 1.0 / b;
    let resid = ((2.0 * ev / tc).sinh() * (2.0 * eh / tc).sinh() - 1.0).abs();
    if resid > 1e-13 {
        return Err(Error::numeric(format!(
            "critical temperature residual {resid:.3e} exceeds tolerance"
        )));
    }
    Ok(tc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isotropic_critical_temperature_closed_form() {
        // sinh(2/Tc) = 1  =>  Tc = 2 / ln(1 + sqrt 2)
        let tc = critical_temperature(1.0, 1.0).unwrap();
        let exact = 2.0 / (1.0 + 2f64.sqrt()).ln();
        assert!((tc - exact).abs() < 1e-13, "tc={tc} exact={exact}");
        assert!((tc - 2.269_185_314_213_022).abs() < 1e-12);
    }

    #[test]
    fn critical_temperature_scales_with_couplings() {
        let tc_half = critical_temperature(0.5, 0.5).unwrap();
        let exact = 1.0 / (1.0 + 2f64.sqrt()).ln();
        assert!((tc_half - exact).abs() < 1e-13);
    }

    #[test]
    fn anisotropic_critical_residual_and_bisection_oracle() {
        let (ev, eh) = (2.0, 1.0);
        let tc = critical_temperature(ev, eh).unwrap();
        let resid = ((4.0 / tc).sinh() * (2.0 / tc).sinh() - 1.0).abs();
        assert!(resid < 1e-14, "residual {resid:e}");

        // Independent oracle: plain bisection on T.
        let f = |t: f64| (4.0 / t).sinh() * (2.0 / t).sinh() - 1.0;
        let (mut lo, mut hi) = (0.5, 50.0);
        assert!(f(lo) > 0.0 && f(hi) < 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let tc_bisect = 0.5 * (lo + hi);
        assert!((tc - tc_bisect).abs() < 1e-12, "{tc} vs {tc_bisect}");
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(critical_temperature(-1.0, 1.0).is_err());
        assert!(CouplingPoint::new(1.0, 1.0, 0.0).is_err());
        assert!(CouplingPoint::new(1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn derived_variables_at_critical_point() {
        let p = CouplingPoint::critical(1.0, 1.0).unwrap();
        assert_eq!(p.branch, Branch::AtTc);
        assert!((p.s_v * p.s_h - 1.0).abs() < 1e-14);
        assert!((p.k - 1.0).abs() < 1e-13);
        assert!((p.t - 1.0).abs() < 1e-13);
        assert!(p.tau.unwrap().abs() < 1e-13);
        assert!((p.w.unwrap() - 0.25).abs() < 1e-13);
    }

    #[test]
    fn derived_variables_direct_substitution() {
        // Isotropic point with s = 2: T such that sinh(2/T) = 2.
        let t = 2.0 / 2f64.asinh();
        let p = CouplingPoint::new(1.0, 1.0, t).unwrap();
        assert_eq!(p.branch, Branch::BelowTc);
        assert!((p.s_v - 2.0).abs() < 1e-12);
        assert!((p.k - 0.25).abs() < 1e-12);
        assert!((p.t - 1.0 / 16.0).abs() < 1e-12);
        assert!((p.w.unwrap() - 0.2).abs() < 1e-12);

        // s = 1/2: tau = (2 - 1/2)/2 = 3/4.
        let t = 2.0 / 0.5f64.asinh();
        let p = CouplingPoint::new(1.0, 1.0, t).unwrap();
        assert_eq!(p.branch, Branch::AboveTc);
        assert!((p.tau.unwrap() - 0.75).abs() < 1e-12);
        assert!((p.t - 1.0 / 16.0).abs() < 1e-12);
    }

    #[test]
    fn algebraic_identities_hold() {
        for &temp in &[1.3, 2.0, 2.26, 2.3, 3.5, 8.0] {
            let p = CouplingPoint::new(1.0, 1.0, temp).unwrap();
            assert!((p.k * p.s_v * p.s_h - 1.0).abs() < 1e-14);
            let s = p.s_v;
            assert!((p.tau.unwrap() - 0.5 * (1.0 / s - s)).abs() < 1e-14);
            assert!((p.w.unwrap() * 2.0 * (s + 1.0 / s) - 1.0).abs() < 1e-14);
            let texp = if p.branch == Branch::BelowTc {
                p.k * p.k
            } else {
                (p.s_v * p.s_h).powi(2)
            };
            assert!((p.t - texp).abs() < 1e-14);
            assert!(p.t <= 1.0 + 1e-14);
        }
    }

    #[test]
    fn duality_is_an_involution() {
        for &(ev, eh, temp) in &[(1.0, 1.0, 1.9), (1.0, 1.0, 3.0), (2.0, 0.7, 2.4)] {
            let p = CouplingPoint::new(ev, eh, temp).unwrap();
            let dd = p.dual().dual();
            assert!((dd.ev - ev).abs() < 1e-12 * ev, "{} vs {}", dd.ev, ev);
            assert!((dd.eh - eh).abs() < 1e-12 * eh);
            // One application inverts both sinh variables.
            let d = p.dual();
            assert!((d.s_v * p.s_v - 1.0).abs() < 1e-12);
            assert!((d.s_h * p.s_h - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn tau_odd_w_even_under_s_inversion() {
        // s -> 1/s is realized by passing to the dual isotropic point.
        for &temp in &[1.7, 2.0, 2.9, 4.0] {
            let p = CouplingPoint::new(1.0, 1.0, temp).unwrap();
            let d = p.dual();
            assert!((p.tau.unwrap() + d.tau.unwrap()).abs() < 1e-12);
            assert!((p.w.unwrap() - d.w.unwrap()).abs() < 1e-12);
        }
    }
}
