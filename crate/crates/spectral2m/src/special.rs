//! Small special-function helpers.

/// Lanczos approximation of the Gamma function (g = 7, 9 terms), accurate to
/// ~1e-13 on the positive axis.
pub fn gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    if x < 0.5 {
        std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * gamma(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut a = COEF[0];
        let t = x + G + 0.5;
        for (i, &c) in COEF.iter().enumerate().skip(1) {
            a += c / (x + i as f64);
        }
        (2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
    }
}

/// `|F(0)|` for the rescaled kernel of order 2m in dimension N:
/// the radial integral of the unimodular symbol gives
/// `(2 pi)^{-N} * surf(S^{N-1}) * Gamma(N/2m) / (2m)`.
pub fn kernel_amplitude_at_zero(m: u32, n_dim: usize) -> f64 {
    let n = n_dim as f64;
    let surf = 2.0 * std::f64::consts::PI.powf(n / 2.0) / gamma(n / 2.0);
    (2.0 * std::f64::consts::PI).powf(-n) * surf * gamma(n / (2.0 * m as f64))
        / (2.0 * m as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_values() {
        assert!((gamma(1.0) - 1.0).abs() < 1e-13);
        assert!((gamma(0.5) - std::f64::consts::PI.sqrt()).abs() < 1e-12);
        assert!((gamma(5.0) - 24.0).abs() < 1e-10);
        assert!((gamma(1.5) - 0.5 * std::f64::consts::PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn amplitude_matches_second_order_closed_form() {
        // m=1: |F(0)| = (4 pi)^{-N/2}
        for n in 1..=3usize {
            let want = (4.0 * std::f64::consts::PI).powf(-(n as f64) / 2.0);
            assert!(
                (kernel_amplitude_at_zero(1, n) - want).abs() < 1e-12,
                "N={n}"
            );
        }
    }
}
