//! Adaptive embedded Runge-Kutta integrator (Dormand-Prince 5(4)).
//!
//! Supports integration in either direction, forced stops at caller-supplied
//! abscissae (so solution values at targets carry no interpolation error),
//! and an accepted-step callback for dense recording.

use crate::error::Error;
use crate::Result;

#[derive(Debug, Clone)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_initial: Option<f64>,
    pub h_min: f64,
    pub max_steps: usize,
    /// Abscissae the integrator must land on exactly.
    pub stops: Vec<f64>,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-12,
            atol: 1e-14,
            h_initial: None,
            h_min: 1e-13,
            max_steps: 10_000_000,
            stops: Vec::new(),
        }
    }
}

const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const C: [f64; 6] = [0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
// y5 - y4 error weights: A[5][j] - B4[j], with the extra k7 term -B4[6].
const E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

/// Integrate `y' = f(t, y)` from `t0` to `t_end` (either direction).
///
/// `on_step(t, y)` is called at `t0` and after every accepted step; the
/// returned vector is the state at `t_end`.
pub fn integrate<F, S>(
    f: &F,
    t0: f64,
    y0: &[f64],
    t_end: f64,
    opts: &OdeOptions,
    on_step: &mut S,
) -> Result<Vec<f64>>
where
    F: Fn(f64, &[f64], &mut [f64]),
    S: FnMut(f64, &[f64]),
{
    let dim = y0.len();
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    let mut stops: Vec<f64> = opts
        .stops
        .iter()
        .copied()
        .filter(|&s| (s - t0) * dir > 0.0 && (t_end - s) * dir > 0.0)
        .collect();
    stops.sort_by(|a, b| ((a - t0) * dir).total_cmp(&((b - t0) * dir)));
    let mut stop_idx = 0usize;

    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k = vec![vec![0.0f64; dim]; 7];
    f(t, &y, &mut k[0]);
    on_step(t, &y);

    let span = (t_end - t0).abs();
    let mut h = opts.h_initial.unwrap_or(span * 1e-4).abs().max(opts.h_min) * dir;

    let mut yt = vec![0.0f64; dim];
    let mut steps = 0usize;
    while (t_end - t) * dir > 0.0 {
        steps += 1;
        if steps > opts.max_steps {
            return Err(Error::numeric(format!(
                "ODE integrator exceeded {} steps at t = {t}",
                opts.max_steps
            )));
        }
        // clamp to the next mandatory stop or the end point
        let mut limit = t_end;
        if stop_idx < stops.len() && (stops[stop_idx] - t_end) * dir < 0.0 {
            limit = stops[stop_idx];
        }
        if (t + h - limit) * dir > 0.0 {
            h = limit - t;
        }

        // stages: k[s+1] = f(t + C[s] h, y + h sum_j A[s][j] k[j])
        for s in 0..6 {
            for d in 0..dim {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(s + 1) {
                    if A[s][j] != 0.0 {
                        acc += A[s][j] * kj[d];
                    }
                }
                yt[d] = y[d] + h * acc;
            }
            let ts = t + C[s] * h;
            let (head, tail) = k.split_at_mut(s + 1);
            let _ = head;
            f(ts, &yt, &mut tail[0]);
        }
        // after s = 5: yt is the 5th-order solution, k[6] = f(t+h, yt) (FSAL)
        let mut err = 0.0f64;
        for d in 0..dim {
            let mut e = 0.0;
            for (j, kj) in k.iter().enumerate() {
                if E[j] != 0.0 {
                    e += E[j] * kj[d];
                }
            }
            let sc = opts.atol + opts.rtol * y[d].abs().max(yt[d].abs());
            err = err.max((h * e / sc).abs());
        }
        let err = err.max(1e-300);

        if err <= 1.0 {
            t += h;
            y.copy_from_slice(&yt);
            let k6 = k[6].clone();
            k[0].copy_from_slice(&k6);
            on_step(t, &y);
            if stop_idx < stops.len() && (t - stops[stop_idx]) * dir >= 0.0 {
                stop_idx += 1;
            }
        }
        let fac = (0.9 * err.powf(-0.2)).clamp(0.2, 5.0);
        h *= fac;
        if h.abs() < opts.h_min {
            h = opts.h_min * dir;
        }
        if !h.is_finite() || h == 0.0 {
            return Err(Error::numeric("ODE step size collapsed".to_string()));
        }
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth() {
        let f = |_t: f64, y: &[f64], dy: &mut [f64]| dy[0] = y[0];
        let y = integrate(&f, 0.0, &[1.0], 1.0, &OdeOptions::default(), &mut |_, _| {}).unwrap();
        assert!((y[0] - 1f64.exp()).abs() < 1e-11);
    }

    #[test]
    fn backward_integration_and_stops() {
        // y' = -2 t y, integrate from t=2 back to 0: y = exp(-t^2).
        let f = |t: f64, y: &[f64], dy: &mut [f64]| dy[0] = -2.0 * t * y[0];
        let y2 = (-4.0f64).exp();
        let mut seen = Vec::new();
        let opts = OdeOptions {
            stops: vec![1.0, 0.5],
            ..Default::default()
        };
        let y = integrate(&f, 2.0, &[y2], 0.0, &opts, &mut |t, y| seen.push((t, y[0]))).unwrap();
        assert!((y[0] - 1.0).abs() < 1e-10);
        for target in [1.0, 0.5] {
            let hit = seen.iter().any(|&(t, _)| (t - target).abs() < 1e-14);
            assert!(hit, "no exact stop at {target}");
        }
        let at1 = seen
            .iter()
            .find(|&&(t, _)| (t - 1.0).abs() < 1e-14)
            .unwrap()
            .1;
        assert!((at1 - (-1.0f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn harmonic_oscillator_long_range() {
        let f = |_t: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = y[1];
            dy[1] = -y[0];
        };
        let y = integrate(
            &f,
            0.0,
            &[1.0, 0.0],
            20.0 * std::f64::consts::PI,
            &OdeOptions::default(),
            &mut |_, _| {},
        )
        .unwrap();
        assert!((y[0] - 1.0).abs() < 1e-8, "cos error {}", (y[0] - 1.0).abs());
    }
}
