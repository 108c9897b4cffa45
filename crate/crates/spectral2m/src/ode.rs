//! Adaptive Dormand-Prince RK45 on small real state vectors.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum OdeError {
    #[error("step size underflow at t={t} (h={h:.3e})")]
    StepUnderflow { t: f64, h: f64 },
}

pub struct OdeOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub h_initial: f64,
    pub h_max: f64,
    pub h_min: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            h_initial: 1e-3,
            h_max: 1.0,
            h_min: 1e-14,
        }
    }
}

/// Integrate `dy/dt = f(t, y)` from `t0` to `t1`, recording every accepted
/// step.  `step_ceiling(t, y)` can force phase-resolving step caps; return
/// `f64::INFINITY` for no cap.
pub fn integrate<F, C>(
    f: F,
    t0: f64,
    t1: f64,
    y0: &[f64],
    opts: &OdeOptions,
    mut step_ceiling: C,
) -> Result<(Vec<f64>, Vec<Vec<f64>>), OdeError>
where
    F: Fn(f64, &[f64], &mut [f64]),
    C: FnMut(f64, &[f64]) -> f64,
{
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
    const C_NODES: [f64; 6] = [0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
    const B5: [f64; 7] = [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
        0.0,
    ];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];

    let n = y0.len();
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut h = opts.h_initial.min(t1 - t0).max(opts.h_min);
    let mut ts = vec![t0];
    let mut ys = vec![y.clone()];
    let mut k = vec![vec![0.0; n]; 7];
    let mut ytmp = vec![0.0; n];

    while t < t1 {
        let cap = step_ceiling(t, &y);
        h = h.min(cap).min(t1 - t).min(opts.h_max);
        if h < opts.h_min {
            return Err(OdeError::StepUnderflow { t, h });
        }
        f(t, &y, &mut k[0]);
        for s in 0..6 {
            for i in 0..n {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(s + 1) {
                    acc += A[s][j] * kj[i];
                }
                ytmp[i] = y[i] + h * acc;
            }
            let (_, tail) = k.split_at_mut(s + 1);
            f(t + C_NODES[s] * h, &ytmp, &mut tail[0]);
        }
        let mut err = 0.0f64;
        let mut y5 = vec![0.0; n];
        for i in 0..n {
            let mut v5 = 0.0;
            let mut v4 = 0.0;
            for s in 0..7 {
                v5 += B5[s] * k[s][i];
                v4 += B4[s] * k[s][i];
            }
            y5[i] = y[i] + h * v5;
            let sc = opts.abs_tol + opts.rel_tol * y[i].abs().max(y5[i].abs());
            err = err.max((h * (v5 - v4)).abs() / sc);
        }
        if err <= 1.0 {
            t += h;
            y = y5;
            ts.push(t);
            ys.push(y.clone());
        }
        let factor = if err > 0.0 { 0.9 * err.powf(-0.2) } else { 5.0 };
        h *= factor.clamp(0.2, 5.0);
    }
    Ok((ts, ys))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let (ts, ys) = integrate(
            |_t, y, dy| dy[0] = -y[0],
            0.0,
            5.0,
            &[1.0],
            &OdeOptions::default(),
            |_, _| f64::INFINITY,
        )
        .unwrap();
        let yf = ys.last().unwrap()[0];
        assert!((yf - (-ts.last().unwrap()).exp()).abs() < 1e-9);
    }

    #[test]
    fn circular_orbit_preserves_radius() {
        let (_, ys) = integrate(
            |_t, y, dy| {
                dy[0] = -y[1];
                dy[1] = y[0];
            },
            0.0,
            50.0,
            &[1.0, 0.0],
            &OdeOptions::default(),
            |_, _| f64::INFINITY,
        )
        .unwrap();
        for y in ys.iter().step_by(100) {
            let r = (y[0] * y[0] + y[1] * y[1]).sqrt();
            assert!((r - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn step_ceiling_enforced() {
        let (ts, _) = integrate(
            |_t, _y, dy| dy[0] = 1.0,
            0.0,
            1.0,
            &[0.0],
            &OdeOptions::default(),
            |_, _| 0.01,
        )
        .unwrap();
        for w in ts.windows(2) {
            assert!(w[1] - w[0] <= 0.01 + 1e-12);
        }
    }
}
