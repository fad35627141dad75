//! Small dense linear algebra: determinants by LU, leading-principal-minor
//! sweeps for Toeplitz matrices, and least squares by Householder QR.

/// Determinant by LU with partial pivoting. Returns (det, min |pivot|).
pub fn lu_det(a: &mut Vec<Vec<f64>>) -> (f64, f64) {
    let n = a.len();
    let mut det = 1.0f64;
    let mut min_piv = f64::INFINITY;
    for col in 0..n {
        let (mut imax, mut vmax) = (col, a[col][col].abs());
        for (r, row) in a.iter().enumerate().skip(col + 1) {
            if row[col].abs() > vmax {
                imax = r;
                vmax = row[col].abs();
            }
        }
        if vmax == 0.0 {
            return (0.0, 0.0);
        }
        if imax != col {
            a.swap(imax, col);
            det = -det;
        }
        let piv = a[col][col];
        det *= piv;
        min_piv = min_piv.min(piv.abs());
        for r in col + 1..n {
            let f = a[r][col] / piv;
            if f != 0.0 {
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    (det, min_piv)
}

/// All leading principal minors D_1..D_n of a matrix, by Gaussian elimination
/// WITHOUT pivoting (the pivots' running products are exactly the minors).
///
/// Valid when every leading minor is nonzero, which holds for the Toeplitz
/// correlation matrices this is used on; cross-checked against pivoted LU in
/// tests.
pub fn principal_minors(a: &mut Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    let mut out = Vec::with_capacity(n);
    let mut det = 1.0f64;
    for col in 0..n {
        let piv = a[col][col];
        det *= piv;
        out.push(det);
        if piv == 0.0 {
            for _ in col + 1..n {
                out.push(0.0);
            }
            return out;
        }
        for r in col + 1..n {
            let f = a[r][col] / piv;
            if f != 0.0 {
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    out
}

/// Least squares solve of `A x = y` (rows >= cols) by Householder QR.
pub fn least_squares(a: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let m = a.len();
    let n = a[0].len();
    assert!(m >= n);
    let mut r: Vec<Vec<f64>> = a.to_vec();
    let mut b = y.to_vec();
    for k in 0..n {
        // Householder vector for column k
        let mut norm = 0.0;
        for row in r.iter().skip(k) {
            norm += row[k] * row[k];
        }
        let norm = norm.sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = if r[k][k] > 0.0 { -norm } else { norm };
        let mut v = vec![0.0; m];
        v[k] = r[k][k] - alpha;
        for i in k + 1..m {
            v[i] = r[i][k];
        }
        let vtv: f64 = v.iter().map(|x| x * x).sum();
        if vtv == 0.0 {
            continue;
        }
        for c in k..n {
            let dot: f64 = (k..m).map(|i| v[i] * r[i][c]).sum();
            let f = 2.0 * dot / vtv;
            for i in k..m {
                r[i][c] -= f * v[i];
            }
        }
        let dot: f64 = (k..m).map(|i| v[i] * b[i]).sum();
        let f = 2.0 * dot / vtv;
        for i in k..m {
            b[i] -= f * v[i];
        }
    }
    // back substitution
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let mut s = b[k];
        for c in k + 1..n {
            s -= r[k][c] * x[c];
        }
        x[k] = s / r[k][k];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lu_det_small() {
        let mut a = vec![vec![2.0, 1.0], vec![1.0, 3.0]];
        let (d, _) = lu_det(&mut a);
        assert!((d - 5.0).abs() < 1e-14);
    }

    #[test]
    fn minors_match_pivoted_lu() {
        // a diagonally dominant Toeplitz-ish matrix
        let n = 6;
        let t = |k: i64| 1.0 / (1.0 + (k as f64).abs()) * if k < 0 { 0.9 } else { 1.0 };
        let build = |m: usize| -> Vec<Vec<f64>> {
            (0..m)
                .map(|i| (0..m).map(|j| t(i as i64 - j as i64)).collect())
                .collect()
        };
        let mut full = build(n);
        let minors = principal_minors(&mut full);
        for m in 1..=n {
            let mut sub = build(m);
            let (d, _) = lu_det(&mut sub);
            assert!(
                (minors[m - 1] - d).abs() < 1e-12 * d.abs().max(1.0),
                "minor {m}: {} vs {d}",
                minors[m - 1]
            );
        }
    }

    #[test]
    fn least_squares_recovers_polynomial() {
        // y = 3 - 2x + 0.5 x^2 sampled with no noise
        let xs: Vec<f64> = (0..20).map(|i| i as f64 * 0.1).collect();
        let a: Vec<Vec<f64>> = xs.iter().map(|&x| vec![1.0, x, x * x]).collect();
        let y: Vec<f64> = xs.iter().map(|&x| 3.0 - 2.0 * x + 0.5 * x * x).collect();
        let c = least_squares(&a, &y);
        assert!((c[0] - 3.0).abs() < 1e-12);
        assert!((c[1] + 2.0).abs() < 1e-12);
        assert!((c[2] - 0.5).abs() < 1e-12);
    }
}
