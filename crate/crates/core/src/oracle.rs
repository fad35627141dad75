//! Exhaustive-enumeration ground truth on small finite lattices: exact
//! partition polynomials, correlations, Lee-Yang zeros in the fugacity, and
//! partition zeros in the Boltzmann variable, plus a numeric transfer-matrix
//! mode for cylinders.
//!
//! Every other module's claims are ultimately checked against this one.
//! Enumeration walks configurations in Gray-code order (one spin flip per
//! step, O(1) incremental update of the unsatisfied-bond count), in parallel
//! over configuration blocks with exact integer merges.

use crate::error::Error;
use crate::numerics::dyadic::{working_bits, Dyadic, DyadicComplex};
use crate::numerics::roots::{aberth_f64, aberth_polish_dyadic};
use crate::Result;
use num_bigint::BigUint;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

/// Boundary condition of a finite lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryCondition {
    /// Periodic in both directions (torus). Wrap-around duplicates on 1- or
    /// 2-wide lattices are kept: a 2x2 torus genuinely has doubled bonds.
    Periodic,
    /// Periodic vertically, open horizontally.
    Cylindrical,
}

/// A finite lattice with finite-range pair couplings.
#[derive(Debug, Clone)]
pub struct FiniteLattice {
    pub lv: usize,
    pub lh: usize,
    pub boundary: BoundaryCondition,
    /// Displacement -> energy, canonical directions only.
    couplings: Vec<((i64, i64), f64)>,
    /// Bond list (site_a, site_b, energy), self-bonds dropped.
    bonds: Vec<(usize, usize, f64)>,
}

/// Exhaustive-mode site cap (2^25 configurations).
pub const MAX_EXHAUSTIVE_SITES: usize = 25;
/// Transfer-matrix width cap.
pub const MAX_TM_WIDTH: usize = 12;

impl FiniteLattice {
    /// Nearest-neighbor lattice with vertical coupling `ev`, horizontal `eh`.
    pub fn nearest_neighbor(
        lv: usize,
        lh: usize,
        ev: f64,
        eh: f64,
        boundary: BoundaryCondition,
    ) -> Result<Self> {
        Self::with_couplings(lv, lh, boundary, &[((1, 0), ev), ((0, 1), eh)])
    }

    /// Isotropic nearest-neighbor lattice.
    pub fn isotropic(lv: usize, lh: usize, e: f64, boundary: BoundaryCondition) -> Result<Self> {
        Self::nearest_neighbor(lv, lh, e, e, boundary)
    }

    /// General finite-range couplings: one entry per displacement class
    /// `(dj, dk)` (the negated displacement is implied). Zero couplings are
    /// dropped.
    pub fn with_couplings(
        lv: usize,
        lh: usize,
        boundary: BoundaryCondition,
        couplings: &[((i64, i64), f64)],
    ) -> Result<Self> {
        if lv == 0 || lh == 0 {
            return Err(Error::domain("lattice must have at least one site".to_string()));
        }
        let mut canon: Vec<((i64, i64), f64)> = Vec::new();
        for &((dj, dk), e) in couplings {
            if e == 0.0 {
                continue;
            }
            if (dj, dk) == (0, 0) {
                return Err(Error::domain("zero displacement coupling".to_string()));
            }
            // canonical direction: first nonzero component positive
            let key = if dj > 0 || (dj == 0 && dk > 0) {
                (dj, dk)
            } else {
                (-dj, -dk)
            };
            if let Some(entry) = canon.iter_mut().find(|(d, _)| *d == key) {
                if (entry.1 - e).abs() > 1e-15 * e.abs().max(1.0) {
                    return Err(Error::domain(format!(
                        "conflicting couplings for displacement {key:?}"
                    )));
                }
            } else {
                canon.push((key, e));
            }
        }
        let mut lat = FiniteLattice {
            lv,
            lh,
            boundary,
            couplings: canon,
            bonds: Vec::new(),
        };
        lat.bonds = lat.build_bonds();
        Ok(lat)
    }

    pub fn n_sites(&self) -> usize {
        self.lv * self.lh
    }

    pub fn site(&self, j: usize, k: usize) -> usize {
        j * self.lh + k
    }

    pub fn bonds(&self) -> &[(usize, usize, f64)] {
        &self.bonds
    }

    fn build_bonds(&self) -> Vec<(usize, usize, f64)> {
        let mut bonds = Vec::new();
        for j in 0..self.lv as i64 {
            for k in 0..self.lh as i64 {
                for &((dj, dk), e) in &self.couplings {
                    let ja = j + dj;
                    let ka = k + dk;
                    // vertical direction always periodic; horizontal wraps
                    // only on the torus
                    let ja = ja.rem_euclid(self.lv as i64);
                    let ka = match self.boundary {
                        BoundaryCondition::Periodic => ka.rem_euclid(self.lh as i64),
                        BoundaryCondition::Cylindrical => {
                            if ka < 0 || ka >= self.lh as i64 {
                                continue;
                            }
                            ka
                        }
                    };
                    let a = self.site(j as usize, k as usize);
                    let b = self.site(ja as usize, ka as usize);
                    if a != b {
                        bonds.push((a, b, e));
                    }
                }
            }
        }
        bonds
    }

    /// All couplings equal (single scale)? Returns the scale if so; a
    /// bond-free lattice trivially has scale zero.
    pub fn uniform_scale(&self) -> Option<f64> {
        let mut scale = None;
        for &(_, e) in &self.couplings {
            match scale {
                None => scale = Some(e),
                Some(s) if (s - e).abs() <= 1e-15 * s.abs() => {}
                _ => return None,
            }
        }
        Some(scale.unwrap_or(0.0))
    }

    pub fn is_ferromagnetic(&self) -> bool {
        self.couplings.iter().all(|&(_, e)| e > 0.0)
    }
}

/// Exact partition polynomial of a single-coupling-scale lattice:
///
/// `Z = exp((E B + H N)/T) * sum_{u,n} counts[u][n] x^u z^n`
///
/// with `x = exp(-2E/T)`, `z = exp(-2H/T)`, `u` the number of unsatisfied
/// bonds and `n` the number of down spins.
#[derive(Debug, Clone)]
pub struct PartitionPolynomial {
    /// counts[u][n], exact.
    pub counts: Vec<Vec<u64>>,
    pub n_sites: usize,
    pub n_bonds: usize,
    pub coupling: f64,
}

impl PartitionPolynomial {
    /// Total number of configurations (must be `2^N`).
    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    /// Coefficients as big integers (for exact serialization).
    pub fn counts_big(&self) -> Vec<Vec<BigUint>> {
        self.counts
            .iter()
            .map(|row| row.iter().map(|&c| BigUint::from(c)).collect())
            .collect()
    }

    /// Evaluate the polynomial part at `(x, z)`.
    pub fn eval(&self, x: f64, z: f64) -> f64 {
        let mut acc = 0.0;
        for (u, row) in self.counts.iter().enumerate() {
            let xu = x.powi(u as i32);
            let mut zrow = 0.0;
            for (n, &c) in row.iter().enumerate() {
                if c != 0 {
                    zrow += c as f64 * z.powi(n as i32);
                }
            }
            acc += xu * zrow;
        }
        acc
    }

    /// `ln Z` per the stored convention at temperature `T`, field `H`.
    pub fn log_z(&self, temperature: f64, h: f64) -> f64 {
        let x = (-2.0 * self.coupling / temperature).exp();
        let z = (-2.0 * h / temperature).exp();
        (self.coupling * self.n_bonds as f64 + h * self.n_sites as f64) / temperature
            + self.eval(x, z).ln()
    }

    /// Spin-flip symmetry `counts[u][n] == counts[u][N-n]`, exactly.
    pub fn flip_symmetric(&self) -> bool {
        self.counts
            .iter()
            .all(|row| (0..row.len()).all(|n| row[n] == row[row.len() - 1 - n]))
    }

    /// Exact magnetization sum at `H = 0`: `sum counts (N - 2n) x^u` is zero
    /// by symmetry; returns the exact integer coefficient sums per power.
    pub fn magnetization_coefficients(&self) -> Vec<i64> {
        self.counts
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .map(|(n, &c)| c as i64 * (self.n_sites as i64 - 2 * n as i64))
                    .sum()
            })
            .collect()
    }

    /// Finite-lattice susceptibility `kT chi = (<M^2> - <M>^2)/N` at `H=0`.
    pub fn susceptibility(&self, temperature: f64) -> f64 {
        let x = (-2.0 * self.coupling / temperature).exp();
        let mut z0 = 0.0;
        let mut m2 = 0.0;
        for (u, row) in self.counts.iter().enumerate() {
            let xu = x.powi(u as i32);
            for (n, &c) in row.iter().enumerate() {
                let m = self.n_sites as f64 - 2.0 * n as f64;
                z0 += c as f64 * xu;
                m2 += c as f64 * xu * m * m;
            }
        }
        // <M> = 0 at H = 0
        m2 / z0 / self.n_sites as f64
    }

    /// Coefficients of the fugacity polynomial `P(z) = sum_n c_n(x) z^n`
    /// evaluated at dyadic `x`.
    pub fn z_polynomial_dyadic(&self, x: &Dyadic, bits: u32) -> Vec<Dyadic> {
        let n = self.n_sites;
        let mut coeffs = vec![Dyadic::zero(bits); n + 1];
        let mut xu = Dyadic::from_i64(1, bits);
        for row in self.counts.iter() {
            for (nd, &c) in row.iter().enumerate() {
                if c != 0 {
                    let term = &xu * &Dyadic::from_i64(c as i64, bits);
                    coeffs[nd] = &coeffs[nd] + &term;
                }
            }
            xu = &xu * x;
        }
        coeffs
    }
}

struct GrayWalk {
    mult1: Vec<u32>,
    mult2: Vec<u32>,
    deg1: Vec<u32>,
    deg2: Vec<u32>,
}

impl GrayWalk {
    fn new(lat: &FiniteLattice) -> Result<Self> {
        let n = lat.n_sites();
        let mut mult: Vec<std::collections::BTreeMap<usize, u32>> = vec![Default::default(); n];
        for &(a, b, _) in &lat.bonds {
            *mult[a].entry(b).or_insert(0) += 1;
            *mult[b].entry(a).or_insert(0) += 1;
        }
        let mut mult1 = vec![0u32; n];
        let mut mult2 = vec![0u32; n];
        for (i, m) in mult.iter().enumerate() {
            for (&j, &cnt) in m {
                match cnt {
                    1 => mult1[i] |= 1 << j,
                    2 => mult2[i] |= 1 << j,
                    _ => {
                        return Err(Error::unsupported(
                            "bond multiplicity above 2 in enumeration".to_string(),
                        ))
                    }
                }
            }
        }
        let deg1 = mult1.iter().map(|m| m.count_ones()).collect();
        let deg2 = mult2.iter().map(|m| m.count_ones()).collect();
        Ok(GrayWalk {
            mult1,
            mult2,
            deg1,
            deg2,
        })
    }

    /// Unsatisfied bonds of a configuration, from scratch.
    fn unsat_of(&self, lat: &FiniteLattice, state: u32) -> u32 {
        let mut u = 0;
        for &(a, b, _) in &lat.bonds {
            if ((state >> a) ^ (state >> b)) & 1 == 1 {
                u += 1;
            }
        }
        u
    }

    /// Change in the unsatisfied count when flipping `site` of `state`.
    #[inline]
    fn flip_delta(&self, state: u32, site: usize) -> i32 {
        let b = (state >> site) & 1;
        let pc1 = (self.mult1[site] & state).count_ones();
        let d1 = if b == 1 { self.deg1[site] - pc1 } else { pc1 };
        let pc2 = (self.mult2[site] & state).count_ones();
        let d2 = if b == 1 { self.deg2[site] - pc2 } else { pc2 };
        (self.deg1[site] as i32 - 2 * d1 as i32) + 2 * (self.deg2[site] as i32 - 2 * d2 as i32)
    }
}

/// Exhaustively enumerate the exact partition polynomial.
///
/// Preconditions: at most [`MAX_EXHAUSTIVE_SITES`] sites, and a single
/// coupling scale (polynomial output is not defined for mixed couplings).
pub fn enumerate_partition(lat: &FiniteLattice) -> Result<PartitionPolynomial> {
    let n = lat.n_sites();
    if n > MAX_EXHAUSTIVE_SITES {
        return Err(Error::capacity(format!(
            "exhaustive enumeration capped at {MAX_EXHAUSTIVE_SITES} sites, got {n}"
        )));
    }
    let scale = lat.uniform_scale().ok_or_else(|| {
        Error::unsupported(
            "partition polynomial requires a single coupling scale".to_string(),
        )
    })?;
    let walk = GrayWalk::new(lat)?;
    let nb = lat.bonds.len();
    let counts = gray_count(lat, &walk, None)?;
    let poly = PartitionPolynomial {
        counts: counts.0,
        n_sites: n,
        n_bonds: nb,
        coupling: scale,
    };
    // self-check: total count and flip symmetry are structural
    if poly.total() != 1u64 << n {
        return Err(Error::numeric("enumeration lost configurations".to_string()));
    }
    Ok(poly)
}

type CountsPair = (Vec<Vec<u64>>, Option<Vec<Vec<u64>>>);

/// Gray-code walk accumulating counts[unsat][ndown]; when `product_site` is
/// given, counts are split by the sign of `s_0 * s_site` instead (plus in
/// `.0`, minus in `.1`).
fn gray_count(lat: &FiniteLattice, walk: &GrayWalk, product_site: Option<usize>) -> Result<CountsPair> {
    let n = lat.n_sites();
    let nb = lat.bonds.len();
    let total: u64 = 1 << n;
    let blocks: u64 = if n >= 18 { 64 } else { 1 };
    let block_size = total / blocks;

    let run_block = |blk: u64| -> CountsPair {
        let mut plus = vec![vec![0u64; n + 1]; nb + 1];
        let mut minus = product_site.map(|_| vec![vec![0u64; n + 1]; nb + 1]);
        let start = blk * block_size;
        let mut state: u32 = (start ^ (start >> 1)) as u32;
        let mut unsat = walk.unsat_of(lat, state) as i32;
        let mut ndown = state.count_ones() as usize;
        for g in start..start + block_size {
            if g != start {
                let site = g.trailing_zeros() as usize;
                unsat += walk.flip_delta(state, site);
                state ^= 1 << site;
                ndown = state.count_ones() as usize;
            }
            match product_site {
                None => plus[unsat as usize][ndown] += 1,
                Some(s) => {
                    let prod = ((state >> 0) ^ (state >> s)) & 1;
                    if prod == 0 {
                        plus[unsat as usize][ndown] += 1;
                    } else {
                        minus.as_mut().unwrap()[unsat as usize][ndown] += 1;
                    }
                }
            }
        }
        (plus, minus)
    };

    let merged: CountsPair = if blocks == 1 {
        run_block(0)
    } else {
        (0..blocks)
            .into_par_iter()
            .map(run_block)
            .reduce(
                || {
                    (
                        vec![vec![0u64; n + 1]; nb + 1],
                        product_site.map(|_| vec![vec![0u64; n + 1]; nb + 1]),
                    )
                },
                |mut a, b| {
                    for (ra, rb) in a.0.iter_mut().zip(b.0.iter()) {
                        for (ca, cb) in ra.iter_mut().zip(rb.iter()) {
                            *ca += cb;
                        }
                    }
                    if let (Some(ma), Some(mb)) = (a.1.as_mut(), b.1.as_ref()) {
                        for (ra, rb) in ma.iter_mut().zip(mb.iter()) {
                            for (ca, cb) in ra.iter_mut().zip(rb.iter()) {
                                *ca += cb;
                            }
                        }
                    }
                    a
                },
            )
    };
    Ok(merged)
}

/// Thermal two-point function `<s_00 s_{MN}>` by exhaustive enumeration,
/// floating point, general couplings allowed.
pub fn oracle_correlation(
    lat: &FiniteLattice,
    temperature: f64,
    h: f64,
    (m, n): (usize, usize),
) -> Result<f64> {
    if m >= lat.lv || n >= lat.lh {
        return Err(Error::domain(format!(
            "displacement ({m},{n}) outside the {}x{} lattice",
            lat.lv, lat.lh
        )));
    }
    if (m, n) == (0, 0) {
        return Ok(1.0);
    }
    let nsites = lat.n_sites();
    if nsites > MAX_EXHAUSTIVE_SITES {
        return Err(Error::capacity("too many sites".to_string()));
    }
    let site = lat.site(m, n);
    let beta = 1.0 / temperature;
    // direct weighted walk (handles mixed couplings)
    let walk = GrayWalk::new(lat)?;
    let scale = lat.uniform_scale();
    match scale {
        Some(e) => {
            let (plus, minus) = gray_count(lat, &walk, Some(site))?;
            let minus = minus.unwrap();
            let x = (-2.0 * e * beta).exp();
            let z = (-2.0 * h * beta).exp();
            let val = |c: &Vec<Vec<u64>>| -> f64 {
                let mut acc = 0.0;
                for (u, row) in c.iter().enumerate() {
                    let xu = x.powi(u as i32);
                    for (nd, &cnt) in row.iter().enumerate() {
                        if cnt != 0 {
                            acc += cnt as f64 * xu * z.powi(nd as i32);
                        }
                    }
                }
                acc
            };
            let (zp, zm) = (val(&plus), val(&minus));
            Ok((zp - zm) / (zp + zm))
        }
        None => {
            // mixed couplings: accumulate Boltzmann weights directly
            let n_total: u64 = 1 << nsites;
            let mut zsum = 0.0f64;
            let mut csum = 0.0f64;
            let mut state: u32 = 0;
            let bonds = lat.bonds();
            let energy_of = |st: u32| -> f64 {
                let mut e_acc = 0.0;
                for &(a, b, e) in bonds {
                    let sa = 1.0 - 2.0 * ((st >> a) & 1) as f64;
                    let sb = 1.0 - 2.0 * ((st >> b) & 1) as f64;
                    e_acc -= e * sa * sb;
                }
                let mag = nsites as f64 - 2.0 * st.count_ones() as f64;
                e_acc - h * mag
            };
            let e0 = energy_of(0);
            for g in 0..n_total {
                state = (g ^ (g >> 1)) as u32;
                let w = (-beta * (energy_of(state) - e0)).exp();
                let prod = 1.0 - 2.0 * (((state >> 0) ^ (state >> site)) & 1) as f64;
                zsum += w;
                csum += w * prod;
            }
            let _ = state;
            Ok(csum / zsum)
        }
    }
}

/// Exact rational two-point function at rational `x = exp(-2E/T)` and
/// `z = exp(-2H/T)` (single coupling scale).
pub fn oracle_correlation_exact(
    lat: &FiniteLattice,
    x: &BigRational,
    z: &BigRational,
    (m, n): (usize, usize),
) -> Result<BigRational> {
    if m >= lat.lv || n >= lat.lh {
        return Err(Error::domain("displacement outside lattice".to_string()));
    }
    if (m, n) == (0, 0) {
        return Ok(BigRational::one());
    }
    lat.uniform_scale()
        .ok_or_else(|| Error::unsupported("exact mode needs a single coupling scale".to_string()))?;
    let walk = GrayWalk::new(lat)?;
    let site = lat.site(m, n);
    let (plus, minus) = gray_count(lat, &walk, Some(site))?;
    let minus = minus.unwrap();
    let eval = |c: &Vec<Vec<u64>>| -> BigRational {
        let mut acc = BigRational::zero();
        let mut xu = BigRational::one();
        for row in c.iter() {
            let mut zacc = BigRational::zero();
            let mut zn = BigRational::one();
            for &cnt in row.iter() {
                if cnt != 0 {
                    zacc += BigRational::from_integer(cnt.into()) * &zn;
                }
                zn *= z;
            }
            acc += &xu * zacc;
            xu *= x;
        }
        acc
    };
    let (zp, zm) = (eval(&plus), eval(&minus));
    Ok((&zp - &zm) / (zp + zm))
}

/// Lee-Yang zeros report.
#[derive(Debug, Clone)]
pub struct LeeYangReport {
    /// All fugacity zeros with multiplicity (degree = number of sites).
    pub roots: Vec<Complex64>,
    /// Worst deviation of `|z|` from 1.
    pub max_modulus_deviation: f64,
    /// How many exact `z = -1` factors were removed structurally.
    pub exact_minus_one_roots: usize,
}

/// All zeros of the partition function in the fugacity `z = exp(-2H/T)`.
///
/// The Boltzmann factor `x` is the f64 value of `exp(-2E/T)` taken as exact;
/// the polynomial is then a genuine ferromagnetic partition function and its
/// roots provably sit on the unit circle. Roots are found by Aberth in f64
/// and polished at dyadic precision against the exact-in-x coefficients.
pub fn lee_yang_zeros(lat: &FiniteLattice, temperature: f64) -> Result<LeeYangReport> {
    if !lat.is_ferromagnetic() {
        return Err(Error::domain(
            "Lee-Yang circle statement needs ferromagnetic couplings".to_string(),
        ));
    }
    let poly = enumerate_partition(lat)?;
    let n = poly.n_sites;
    // structural (z+1) factors: pair configurations with their global flip;
    // for an odd site count the fugacity polynomial has z = -1 as an exact
    // root. Divide it out on the integer count matrix.
    let mut counts: Vec<Vec<i64>> = (0..=n)
        .map(|nd| {
            poly.counts
                .iter()
                .map(|row| row[nd] as i64)
                .collect::<Vec<i64>>()
        })
        .collect(); // counts[nd][u]
    let mut exact_roots = 0usize;
    loop {
        // evaluate at z = -1: alternating sum per u-power must vanish
        let nb = poly.n_bonds;
        let vanishes = (0..=nb).all(|u| {
            let s: i64 = counts
                .iter()
                .enumerate()
                .map(|(nd, row)| if nd % 2 == 0 { row[u] } else { -row[u] })
                .sum();
            s == 0
        });
        if !vanishes || counts.len() <= 1 {
            break;
        }
        // synthetic division by (z + 1): q_i = c_{i+1} - q_{i+1}
        let deg = counts.len() - 1;
        let mut q: Vec<Vec<i64>> = vec![vec![0; poly.n_bonds + 1]; deg];
        // process from the top: q_{deg-1} = c_deg
        for i in (0..deg).rev() {
            for u in 0..=poly.n_bonds {
                let upper = if i + 1 < deg { q[i + 1][u] } else { 0 };
                q[i][u] = counts[i + 1][u] - upper;
            }
        }
        counts = q;
        exact_roots += 1;
    }
    let bits = working_bits();
    let x = Dyadic::from_f64((-2.0 * poly.coupling / temperature).exp(), bits);
    // dyadic coefficients c_nd = sum_u counts[nd][u] x^u
    let mut dy_coeffs: Vec<Dyadic> = Vec::with_capacity(counts.len());
    for row in &counts {
        let mut acc = Dyadic::zero(bits);
        let mut xu = Dyadic::from_i64(1, bits);
        for &c in row.iter() {
            if c != 0 {
                acc = &acc + &(&xu * &Dyadic::from_i64(c, bits));
            }
            xu = &xu * &x;
        }
        dy_coeffs.push(acc);
    }
    let f64_coeffs: Vec<Complex64> = dy_coeffs
        .iter()
        .map(|d| Complex64::new(d.to_f64(), 0.0))
        .collect();
    let mut roots = if f64_coeffs.len() > 1 {
        let rough = aberth_f64(&f64_coeffs)?;
        let dyc: Vec<DyadicComplex> = dy_coeffs
            .iter()
            .map(|d| DyadicComplex::new(d.clone(), Dyadic::zero(bits)))
            .collect();
        let polished = aberth_polish_dyadic(&dyc, &rough, bits, 80);
        polished.iter().map(|p| p.to_complex64()).collect()
    } else {
        Vec::new()
    };
    for _ in 0..exact_roots {
        roots.push(Complex64::new(-1.0, 0.0));
    }
    let max_dev = roots
        .iter()
        .map(|r| (r.norm() - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(LeeYangReport {
        roots,
        max_modulus_deviation: max_dev,
        exact_minus_one_roots: exact_roots,
    })
}

/// Partition zeros in `u = exp(-4E/T)` at fixed fugacity.
#[derive(Debug, Clone)]
pub struct UZerosReport {
    pub roots: Vec<Complex64>,
    /// Relative error of reconstructing the coefficients from the roots.
    pub reconstruction_residual: f64,
}

/// Zeros of `Z` as a polynomial in `u = exp(-4E/T)` at `H = 0` (or at a
/// rational fugacity `z`). Periodic lattices have even unsatisfied-bond
/// counts, so `Z` is a true polynomial in `u`.
pub fn complex_u_zeros(lat: &FiniteLattice, z: &BigRational) -> Result<UZerosReport> {
    let poly = enumerate_partition(lat)?;
    // collapse the fugacity direction at rational z
    let mut coeffs_x: Vec<BigRational> = Vec::with_capacity(poly.n_bonds + 1);
    for row in &poly.counts {
        let mut acc = BigRational::zero();
        let mut zn = BigRational::one();
        for &c in row {
            if c != 0 {
                acc += BigRational::from_integer(c.into()) * &zn;
            }
            zn *= z;
        }
        coeffs_x.push(acc);
    }
    // u = x^2: odd x-powers must be absent
    for (u, c) in coeffs_x.iter().enumerate() {
        if u % 2 == 1 && !c.is_zero() {
            return Err(Error::unsupported(
                "odd unsatisfied-bond parity; u-polynomial undefined (open boundary?)".to_string(),
            ));
        }
    }
    let mut coeffs: Vec<Complex64> = coeffs_x
        .iter()
        .step_by(2)
        .map(|c| Complex64::new(crate::series::rational_to_f64(c), 0.0))
        .collect();
    while coeffs.len() > 1 && coeffs.last().unwrap().norm() == 0.0 {
        coeffs.pop();
    }
    if coeffs.len() <= 1 {
        return Ok(UZerosReport {
            roots: Vec::new(),
            reconstruction_residual: 0.0,
        });
    }
    let roots = aberth_f64(&coeffs)?;
    // reconstruction self-check
    let lead = *coeffs.last().unwrap();
    let mut recon = vec![Complex64::new(1.0, 0.0)];
    for r in &roots {
        let mut next = vec![Complex64::new(0.0, 0.0); recon.len() + 1];
        for (i, &c) in recon.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= c * r;
        }
        recon = next;
    }
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut resid = 0.0f64;
    for (i, &c) in coeffs.iter().enumerate() {
        resid = resid.max((recon[i] * lead - c).norm() / scale);
    }
    Ok(UZerosReport {
        roots,
        reconstruction_residual: resid,
    })
}

/// `ln Z` for a cylinder by dense transfer matrix along the periodic
/// direction. Width (open direction) capped at [`MAX_TM_WIDTH`].
pub fn transfer_matrix_log_z(
    width: usize,
    length: usize,
    ev: f64,
    eh: f64,
    temperature: f64,
    h: f64,
) -> Result<f64> {
    if width > MAX_TM_WIDTH {
        return Err(Error::capacity(format!(
            "transfer matrix width capped at {MAX_TM_WIDTH}"
        )));
    }
    if length == 0 || width == 0 {
        return Err(Error::domain("empty cylinder".to_string()));
    }
    let beta = 1.0 / temperature;
    let dim = 1usize << width;
    let intra = |s: usize| -> f64 {
        // open chain of Eh-bonds inside a row
        let mut acc = 0.0;
        for k in 0..width - 1 {
            let a = 1.0 - 2.0 * ((s >> k) & 1) as f64;
            let b = 1.0 - 2.0 * ((s >> (k + 1)) & 1) as f64;
            acc += a * b;
        }
        acc
    };
    let mag = |s: usize| width as f64 - 2.0 * (s.count_ones() as f64);
    let mut t = vec![0.0f64; dim * dim];
    let halves: Vec<f64> = (0..dim)
        .map(|s| 0.5 * beta * (eh * intra(s) + h * mag(s)))
        .collect();
    for s in 0..dim {
        for sp in 0..dim {
            let mut inter = 0.0;
            let agree = !(s ^ sp);
            for k in 0..width {
                inter += if (agree >> k) & 1 == 1 { 1.0 } else { -1.0 };
            }
            t[s * dim + sp] = (halves[s] + halves[sp] + beta * ev * inter).exp();
        }
    }
    // binary exponentiation with renormalization
    let mut log_scale = 0.0f64;
    let norm = |m: &mut Vec<f64>, ls: &mut f64| {
        let mx = m.iter().cloned().fold(0.0f64, f64::max);
        if mx > 0.0 {
            for v in m.iter_mut() {
                *v /= mx;
            }
            *ls += mx.ln();
        }
    };
    let matmul = |a: &[f64], b: &[f64]| -> Vec<f64> {
        let mut c = vec![0.0f64; dim * dim];
        c.par_chunks_mut(dim).enumerate().for_each(|(i, row)| {
            for k in 0..dim {
                let aik = a[i * dim + k];
                if aik != 0.0 {
                    let brow = &b[k * dim..(k + 1) * dim];
                    for (j, rj) in row.iter_mut().enumerate() {
                        *rj += aik * brow[j];
                    }
                }
            }
        });
        c
    };
    norm(&mut t, &mut log_scale);
    let mut result: Option<Vec<f64>> = None;
    let mut result_scale = 0.0f64;
    let mut base = t;
    let mut base_scale = log_scale;
    let mut exp = length;
    while exp > 0 {
        if exp & 1 == 1 {
            match result.take() {
                None => {
                    result = Some(base.clone());
                    result_scale = base_scale;
                }
                Some(r) => {
                    let mut prod = matmul(&r, &base);
                    result_scale += base_scale;
                    norm(&mut prod, &mut result_scale);
                    result = Some(prod);
                }
            }
        }
        exp >>= 1;
        if exp > 0 {
            let mut sq = matmul(&base, &base);
            base_scale *= 2.0;
            norm(&mut sq, &mut base_scale);
            base = sq;
        }
    }
    let m = result.unwrap();
    let trace: f64 = (0..dim).map(|i| m[i * dim + i]).sum();
    Ok(result_scale + trace.ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rat;

    #[test]
    fn decoupled_spins_partition() {
        // E = 0 (no bonds): Z = (2 cosh(H/T))^N
        let lat = FiniteLattice::with_couplings(2, 3, BoundaryCondition::Periodic, &[]).unwrap();
        let poly = enumerate_partition(&lat).unwrap();
        assert_eq!(poly.total(), 64);
        let (t, h) = (1.7, 0.45);
        let lz = poly.log_z(t, h);
        let expect = 6.0 * (2.0 * (h / t).cosh()).ln();
        assert!((lz - expect).abs() < 1e-12, "{lz} vs {expect}");
    }

    #[test]
    fn two_by_two_counts() {
        let lat = FiniteLattice::isotropic(2, 2, 1.0, BoundaryCondition::Periodic).unwrap();
        assert_eq!(lat.bonds().len(), 8, "2x2 torus has doubled bonds");
        let poly = enumerate_partition(&lat).unwrap();
        assert_eq!(poly.total(), 16);
        assert!(poly.flip_symmetric());
        // P(z) coefficients at x: 1 + 4x^4 z + (4x^4 + 2x^8) z^2 + 4x^4 z^3 + z^4
        assert_eq!(poly.counts[0][0], 1); // all up
        assert_eq!(poly.counts[4][1], 4); // single flip
        assert_eq!(poly.counts[4][2], 4); // adjacent pair
        assert_eq!(poly.counts[8][2], 2); // diagonal pair
        assert_eq!(poly.counts[0][4], 1); // all down
        // sum over coefficients at u = z = 1 is 2^4
        assert_eq!(poly.eval(1.0, 1.0), 16.0);
    }

    #[test]
    fn magnetization_vanishes_exactly_at_zero_field() {
        let lat = FiniteLattice::isotropic(3, 3, 1.0, BoundaryCondition::Periodic).unwrap();
        let poly = enumerate_partition(&lat).unwrap();
        for c in poly.magnetization_coefficients() {
            assert_eq!(c, 0);
        }
        assert!(poly.susceptibility(2.3) > 0.0);
        assert!(poly.susceptibility(0.9) > 0.0);
    }

    #[test]
    fn factorization_of_decoupled_columns() {
        // Eh = 0: the 3x2 lattice factorizes into two independent 3x1 rings
        let lat32 =
            FiniteLattice::nearest_neighbor(3, 2, 1.0, 0.0, BoundaryCondition::Periodic).unwrap();
        let lat31 =
            FiniteLattice::nearest_neighbor(3, 1, 1.0, 0.0, BoundaryCondition::Periodic).unwrap();
        let p32 = enumerate_partition(&lat32).unwrap();
        let p31 = enumerate_partition(&lat31).unwrap();
        for &(x, z) in &[(0.3, 1.0), (0.7, 0.4), (1.0, 1.0)] {
            let lhs = p32.eval(x, z);
            let rhs = p31.eval(x, z).powi(2);
            assert!((lhs - rhs).abs() < 1e-9 * rhs.abs(), "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn correlation_trivial_cases() {
        let lat = FiniteLattice::isotropic(3, 3, 1.0, BoundaryCondition::Periodic).unwrap();
        assert_eq!(oracle_correlation(&lat, 2.0, 0.0, (0, 0)).unwrap(), 1.0);
        // very high temperature: independent spins
        let c = oracle_correlation(&lat, 500.0, 0.0, (0, 1)).unwrap();
        assert!(c.abs() < 0.01, "c = {c}");
        // out of range
        assert!(oracle_correlation(&lat, 2.0, 0.0, (3, 0)).is_err());
    }

    #[test]
    fn exact_rational_correlation_matches_float() {
        let lat = FiniteLattice::isotropic(2, 3, 1.0, BoundaryCondition::Periodic).unwrap();
        // x = 1/2 corresponds to T = 2/ln 2
        let x = rat(1, 2);
        let z = rat(1, 1);
        let exact = oracle_correlation_exact(&lat, &x, &z, (0, 1)).unwrap();
        let t = 2.0 / 2f64.ln();
        let f = oracle_correlation(&lat, t, 0.0, (0, 1)).unwrap();
        let e = crate::series::rational_to_f64(&exact);
        assert!((e - f).abs() < 1e-12, "{e} vs {f}");
    }

    #[test]
    fn mixed_coupling_correlation_runs() {
        let lat =
            FiniteLattice::nearest_neighbor(3, 3, 1.3, 0.7, BoundaryCondition::Periodic).unwrap();
        let c = oracle_correlation(&lat, 2.0, 0.1, (1, 1)).unwrap();
        assert!(c > 0.0 && c < 1.0);
    }

    #[test]
    fn single_site_lee_yang() {
        let lat = FiniteLattice::with_couplings(1, 1, BoundaryCondition::Periodic, &[]).unwrap();
        let r = lee_yang_zeros(&lat, 1.0).unwrap();
        assert_eq!(r.roots.len(), 1);
        assert!((r.roots[0] + Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(r.exact_minus_one_roots, 1);
    }

    #[test]
    fn lee_yang_two_by_two() {
        let lat = FiniteLattice::isotropic(2, 2, 1.0, BoundaryCondition::Periodic).unwrap();
        let tc = crate::model::critical_temperature(1.0, 1.0).unwrap();
        let r = lee_yang_zeros(&lat, 2.0 * tc).unwrap();
        assert_eq!(r.roots.len(), 4);
        assert!(
            r.max_modulus_deviation < 1e-10,
            "deviation {:e}",
            r.max_modulus_deviation
        );
    }

    #[test]
    fn lee_yang_three_by_three_and_arc_gap() {
        let lat = FiniteLattice::isotropic(3, 3, 1.0, BoundaryCondition::Periodic).unwrap();
        let tc = crate::model::critical_temperature(1.0, 1.0).unwrap();
        let r_tc = lee_yang_zeros(&lat, tc).unwrap();
        let r_hot = lee_yang_zeros(&lat, 2.0 * tc).unwrap();
        assert_eq!(r_tc.roots.len(), 9);
        assert!(r_tc.max_modulus_deviation < 1e-10);
        assert!(r_hot.max_modulus_deviation < 1e-10);
        // zeros pinch the real axis as T decreases: the minimal |arg z|
        // shrinks from 2Tc to Tc
        let gap = |rep: &LeeYangReport| {
            rep.roots
                .iter()
                .map(|r| r.arg().abs())
                .fold(f64::INFINITY, f64::min)
        };
        assert!(gap(&r_tc) < gap(&r_hot), "{} vs {}", gap(&r_tc), gap(&r_hot));
    }

    #[test]
    fn u_zeros_reconstruction() {
        let lat = FiniteLattice::isotropic(2, 2, 1.0, BoundaryCondition::Periodic).unwrap();
        let r = complex_u_zeros(&lat, &rat(1, 1)).unwrap();
        assert_eq!(r.roots.len(), 4);
        assert!(r.reconstruction_residual < 1e-8);
        // no bonds: no u dependence
        let free = FiniteLattice::with_couplings(2, 2, BoundaryCondition::Periodic, &[]).unwrap();
        let r = complex_u_zeros(&free, &rat(1, 1)).unwrap();
        assert!(r.roots.is_empty());
    }

    #[test]
    fn transfer_matrix_matches_exhaustive() {
        // 4-wide, 5-long cylinder: exhaustive 20 sites vs transfer matrix
        let lat =
            FiniteLattice::nearest_neighbor(5, 4, 1.0, 1.0, BoundaryCondition::Cylindrical)
                .unwrap();
        let poly = enumerate_partition(&lat).unwrap();
        let (t, h) = (2.4, 0.2);
        let lz_exh = poly.log_z(t, h);
        let lz_tm = transfer_matrix_log_z(4, 5, 1.0, 1.0, t, h).unwrap();
        assert!((lz_exh - lz_tm).abs() < 1e-10, "{lz_exh} vs {lz_tm}");
    }

    #[test]
    fn capacity_guard() {
        let lat = FiniteLattice::isotropic(5, 6, 1.0, BoundaryCondition::Periodic).unwrap();
        assert!(enumerate_partition(&lat).is_err());
    }
}
